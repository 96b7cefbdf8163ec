#include "kpsupport/completion/report.hpp"
#include "kpsupport/completion/stats.hpp"
#include "kpsupport/norms.hpp"
#include "kpsupport/projection.hpp"
#include "kpsupport/spectral.hpp"
#include "kpsupport/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace kpsupport;
using namespace kpsupport::completion;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw UsageError(std::string(what) + ": empty entry in '" + text + "'");
    try {
      out.push_back(parse_number_or_inf(item.substr(first, last - first + 1)));
    } catch (const std::invalid_argument&) {
      throw UsageError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": no values given");
  return out;
}

Vector<double> to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector<double>>(values.data(), Index(values.size()));
}

Mat read_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_list(line, path.string().c_str()));
    if (rows.back().size() != rows.front().size())
      throw UsageError(path.string() + ": row " + std::to_string(rows.size()) + " has " +
                       std::to_string(rows.back().size()) + " entries, expected " +
                       std::to_string(rows.front().size()));
  }
  if (rows.empty()) throw UsageError(path.string() + ": empty matrix file");
  Mat out(Index(rows.size()), Index(rows.front().size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return out;
}

std::string join(const Vector<double>& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

/// Inputs shared by norm, dual and project.
struct ValueArgs {
  Index k = 1;
  std::string p = "2";
  double alpha = 1.0;
  std::string vec;
  std::string matrix_file;
};

void add_value_options(CLI::App* cmd, ValueArgs& args, bool with_p) {
  cmd->add_option("--k", args.k, "Cardinality parameter k")->required();
  if (with_p) cmd->add_option("--p", args.p, "Exponent p in [1, inf]; accepts 'inf'")->capture_default_str();
  auto* vec = cmd->add_option("--vec", args.vec, "Comma-separated vector, e.g. \"3,2,1\"");
  auto* file = cmd->add_option("--matrix-file", args.matrix_file,
                               "Comma-separated matrix, one row per line; uses the spectral norm");
  vec->excludes(file);
  file->excludes(vec);
}

SupportParams<double> value_params(const ValueArgs& args, double p) {
  return SupportParams<double>(args.k, p, 1.0);
}

double parse_p(const std::string& text) {
  try {
    return parse_number_or_inf(text);
  } catch (const std::invalid_argument&) {
    throw UsageError("--p: '" + text + "' is not a number or 'inf'");
  }
}

int run_value(const ValueArgs& args, bool dual) {
  const double p = parse_p(args.p);
  if (args.vec.empty() && args.matrix_file.empty()) throw UsageError("give --vec or --matrix-file");
  double value;
  if (!args.vec.empty()) {
    const Vector<double> w = to_vector(parse_list(args.vec, "--vec"));
    value = dual ? kp_dual_norm(w, value_params(args, p)) : kp_norm(w, value_params(args, p));
  } else {
    const Mat W = read_matrix(args.matrix_file);
    value = dual ? spectral_kp_dual_norm(W, value_params(args, p)) : spectral_kp_norm(W, value_params(args, p));
  }
  std::cout << format_number(value) << '\n';
  return 0;
}

int run_project(const ValueArgs& args) {
  if (args.vec.empty() && args.matrix_file.empty()) throw UsageError("give --vec or --matrix-file");
  if (!args.vec.empty()) {
    const Vector<double> w = to_vector(parse_list(args.vec, "--vec"));
    std::cout << join(project_kinf(w, args.k, args.alpha).x) << '\n';
    return 0;
  }
  const Mat X = project_spectral_kinf(read_matrix(args.matrix_file), args.k, args.alpha);
  for (Index i = 0; i < X.rows(); ++i) std::cout << join(X.row(i).transpose()) << '\n';
  return 0;
}

/// Options shared by the experiment commands.
struct ExperimentArgs {
  int trials = 1;
  std::uint64_t seed = 0;
  std::string grid_file;
  std::string grid_preset = "desk";
  std::string out;
  unsigned threads = 1;
  int max_iters = GridConfig::default_solver().max_iters;
  double gap_tol = GridConfig::default_solver().gap_tol;
  double validation = 0.1;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--trials", args.trials, "Number of trials")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Master seed")->capture_default_str();
  cmd->add_option("--grid-file", args.grid_file, "JSON grid {\"alphas\", \"ps\", \"ks\"}; overrides the preset");
  cmd->add_option("--grid", args.grid_preset, "Grid preset: desk or full")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  cmd->add_option("--out", args.out, "Output directory for CSV and JSON files");
  cmd->add_option("--threads", args.threads, "Worker threads for the grid (0 = all cores)")->capture_default_str();
  cmd->add_option("--max-iters", args.max_iters, "Frank-Wolfe iteration cap per cell")->capture_default_str();
  cmd->add_option("--gap-tol", args.gap_tol, "Relative duality gap tolerance")->capture_default_str();
  cmd->add_option("--validation", args.validation, "Share of the training sample used for validation")
      ->capture_default_str();
}

GridSpec experiment_grid(const ExperimentArgs& args) {
  const GridSpec preset = args.grid_preset == "full" ? GridSpec::full() : GridSpec::desk();
  return args.grid_file.empty() ? preset : load_grid_file(args.grid_file, preset);
}

GridConfig experiment_config(const ExperimentArgs& args) {
  GridConfig config;
  config.solver.max_iters = args.max_iters;
  config.solver.gap_tol = args.gap_tol;
  config.threads = args.threads;
  return config;
}

nlohmann::json experiment_json(const ExperimentArgs& args, const GridSpec& grid, const GridConfig& config) {
  return {{"trials", args.trials},
          {"max_iters", config.solver.max_iters},
          {"gap_tol", config.solver.gap_tol},
          {"relative_gap", config.solver.relative_gap},
          {"step_rule", config.solver.step_rule == StepRule::exact_line_search_quadratic ? "line_search" : "fixed"},
          {"svd_tolerance", config.svd.tolerance},
          {"validation_fraction", args.validation},
          {"grid", to_json(grid)}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

template <typename Writer, typename... Args>
std::string render(Writer writer, const Args&... args) {
  std::ostringstream out;
  writer(out, args...);
  return out.str();
}

nlohmann::json paired_tests(const std::vector<MethodSummary>& summaries) {
  nlohmann::json out = nlohmann::json::object();
  const auto& kp = summaries[2].test;
  for (std::size_t other : {0u, 1u}) {
    const auto& base = summaries[other].test;
    if (kp.size() != base.size() || kp.empty()) continue;
    out[to_string(summaries[2].method) + " < " + to_string(summaries[other].method)] =
        paired_sign_flip_pvalue(kp, base);
  }
  return out;
}

void print_summary(const std::vector<MethodSummary>& summaries, const nlohmann::json& tests) {
  std::printf("%-8s %6s %16s %16s %8s %8s\n", "method", "trials", "mean_test", "std_test", "mean_k", "mean_p");
  for (const auto& s : summaries)
    std::printf("%-8s %6zu %16s %16s %8s %8s\n", to_string(s.method).c_str(), s.trials,
                format_number(s.mean_test).c_str(), format_number(s.std_test).c_str(),
                format_number(s.mean_k).c_str(), format_number(s.mean_p).c_str());
  for (const auto& item : tests.items())
    std::printf("one-sided paired sign-flip p-value (%s): %s\n", item.key().c_str(),
                format_number(item.value().get<double>()).c_str());
}

void emit_run(const ProtocolRun& run, nlohmann::json summary, const ExperimentArgs& args) {
  const auto summaries = summarize(run);
  const auto tests = paired_tests(summaries);
  const auto curve = curve_by_p(run);
  summary["methods"] = to_json(summaries);
  summary["paired_sign_flip_pvalues"] = tests;
  summary["optimal_p"] = format_number(curve.optimal_p());
  summary["warnings"] = run.warnings;
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
  print_summary(summaries, tests);
  if (args.out.empty()) return;
  const fs::path dir = args.out;
  fs::create_directories(dir);
  write_file(dir / "cells.csv", render(write_cells_csv, run));
  write_file(dir / "summary.csv", render(write_summary_csv, summaries));
  write_file(dir / "error_vs_p.csv", render(write_curve_csv, curve));
  write_file(dir / "summary.json", summary.dump(2) + "\n");
}

struct SynthArgs {
  std::string protocol = "flat";
  Index d = 100;
  Index m = 100;
  Index r = 5;
  double a = 0.0;
  std::string decays;
  double rho = 0.2;
  std::optional<double> noise;
};

int run_synth(const SynthArgs& s, const ExperimentArgs& args) {
  SyntheticProtocol protocol;
  protocol.kind = parse_synthetic_kind(s.protocol);
  protocol.d = s.d;
  protocol.m = s.m;
  protocol.r = s.r;
  protocol.a = s.a;
  protocol.rho = s.rho;
  protocol.noise_scale = s.noise;
  protocol.validation_fraction = args.validation;
  protocol.trials = args.trials;
  protocol.seed = args.seed;
  protocol.validate();
  const GridSpec grid = experiment_grid(args);
  (void)grid.normalized(std::min(s.d, s.m));
  const GridConfig config = experiment_config(args);

  nlohmann::json summary = {{"version", kVersion}, {"command", "synth"}, {"seed", args.seed}};
  summary["config"] = experiment_json(args, grid, config);
  summary["config"].update({{"protocol", s.protocol},
                            {"d", s.d},
                            {"m", s.m},
                            {"r", s.r},
                            {"rho", s.rho},
                            {"noise_scale", protocol.noise()},
                            {"test_split", "all entries outside the sample, generated matrix"}});

  if (!s.decays.empty()) {
    if (protocol.kind != SyntheticKind::decay) throw UsageError("--decays needs --protocol decay");
    const auto decays = parse_list(s.decays, "--decays");
    summary["config"]["decays"] = decays;
    const DecaySweep sweep = run_decay_sweep(protocol, decays, grid, config);
    std::printf("%16s %10s\n", "a", "optimal_p");
    for (const auto& point : sweep.points)
      std::printf("%16s %10s\n", format_number(point.a).c_str(), format_number(point.optimal_p).c_str());
    std::printf("spearman(a, optimal p): %s\ninversions: %d\n", format_number(sweep.spearman).c_str(),
                sweep.inversions);
    summary["spearman"] = format_number(sweep.spearman);
    summary["inversions"] = sweep.inversions;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& point : sweep.points)
      points.push_back({{"a", point.a}, {"optimal_p", format_number(point.optimal_p)}});
    summary["points"] = points;
    if (!args.out.empty()) {
      const fs::path dir = args.out;
      fs::create_directories(dir);
      write_file(dir / "decay.csv", render(write_decay_csv, sweep));
      write_file(dir / "decay_curves.csv", render(write_decay_curves_csv, sweep));
      write_file(dir / "summary.json", summary.dump(2) + "\n");
    }
    return 0;
  }
  if (protocol.kind == SyntheticKind::decay) summary["config"]["a"] = s.a;
  emit_run(run_synthetic(protocol, grid, config), summary, args);
  return 0;
}

struct RealArgs {
  std::string dataset;
  std::string path;
  double rho = 0.5;
  Index per_user = 20;
  bool sanity = false;
};

int run_real_command(const RealArgs& r, const ExperimentArgs& args) {
  RatingsTable table = r.dataset == "movielens" ? ingest_movielens(fs::path(r.path)) : ingest_jester(fs::path(r.path));
  RealProtocol protocol = r.dataset == "movielens" ? movielens_protocol() : jester_protocol(r.per_user);
  if (r.dataset == "movielens") protocol.sampling = MaskSpec::uniform(r.rho);
  protocol.validation_fraction = args.validation;
  protocol.trials = args.trials;
  protocol.seed = args.seed;
  protocol.sanity = r.sanity;
  const GridSpec grid = experiment_grid(args);
  const GridConfig config = experiment_config(args);

  nlohmann::json summary = {{"version", kVersion}, {"command", "real"}, {"seed", args.seed}};
  summary["config"] = experiment_json(args, grid, config);
  summary["config"].update({{"dataset", r.dataset},
                            {"path", r.path},
                            {"users", table.users},
                            {"items", table.items},
                            {"ratings", table.ratings.size()},
                            {"rating_range", {table.range.min, table.range.max}},
                            {"sanity", r.sanity},
                            {"metric", "nmae"},
                            {"thresholding", "clamp to rating range"}});
  if (r.dataset == "movielens")
    summary["config"]["sampling"] = {{"uniform_fraction", r.rho}};
  else
    summary["config"]["sampling"] = {{"per_user", r.per_user}};
  ProtocolRun run = run_real(table, protocol, grid, config);
  run.warnings.insert(run.warnings.begin(), table.warnings.begin(), table.warnings.end());
  emit_run(run, summary, args);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"(k,p)-support norms and matrix completion experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ValueArgs norm_args, dual_args, project_args;
  auto* norm = app.add_subcommand("norm", "Evaluate the (k,p)-support norm");
  add_value_options(norm, norm_args, true);
  auto* dual = app.add_subcommand("dual", "Evaluate the dual norm");
  add_value_options(dual, dual_args, true);
  auto* project = app.add_subcommand("project", "Project onto the (k,inf)-support ball of radius alpha");
  add_value_options(project, project_args, false);
  project->add_option("--alpha", project_args.alpha, "Ball radius")->capture_default_str();

  SynthArgs synth_args;
  ExperimentArgs synth_exp;
  auto* synth = app.add_subcommand("synth", "Synthetic matrix completion protocol");
  synth->add_option("--protocol", synth_args.protocol, "flat, decay or lowrank")
      ->check(CLI::IsMember({"flat", "decay", "lowrank"}))
      ->capture_default_str();
  synth->add_option("--d", synth_args.d, "Rows")->capture_default_str();
  synth->add_option("--m", synth_args.m, "Columns")->capture_default_str();
  synth->add_option("--r", synth_args.r, "Rank")->capture_default_str();
  synth->add_option("--a", synth_args.a, "Decay rate (decay protocol)")->capture_default_str();
  synth->add_option("--decays", synth_args.decays, "Comma-separated decay rates for an optimal-p sweep");
  synth->add_option("--rho", synth_args.rho, "Sampled fraction of entries")->capture_default_str();
  synth->add_option("--noise", synth_args.noise, "Noise standard deviation (default: 1 for lowrank, else 0.25)");
  add_experiment_options(synth, synth_exp);

  RealArgs real_args;
  ExperimentArgs real_exp;
  auto* real = app.add_subcommand("real", "Ratings data protocol (NMAE)");
  real->add_option("--dataset", real_args.dataset, "movielens or jester")
      ->required()
      ->check(CLI::IsMember({"movielens", "jester"}));
  real->add_option("--path", real_args.path, "Ratings file")->required();
  real->add_option("--rho", real_args.rho, "MovieLens: sampled fraction of ratings")->capture_default_str();
  real->add_option("--per-user", real_args.per_user, "Jester: ratings sampled per user")->capture_default_str();
  real->add_flag("--sanity", real_args.sanity, "Train, validate and test on all ratings");
  add_experiment_options(real, real_exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*norm) return run_value(norm_args, false);
    if (*dual) return run_value(dual_args, true);
    if (*project) return run_project(project_args);
    if (*synth) return run_synth(synth_args, synth_exp);
    if (*real) return run_real_command(real_args, real_exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
