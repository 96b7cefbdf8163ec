#include "kpsupport/completion/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace kpsupport::completion {
namespace {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
}

bool is_trace_ball(Index k, double p) { return k == 1 || p == 1.0; }

struct Solved {
  int iters = 0;
  double gap = 0;
  double val = 0;
  double test = 0;
};

}  // namespace

GridSpec GridSpec::full() {
  GridSpec grid;
  for (int i = 0; i <= 20; ++i) grid.alphas.push_back(std::pow(10.0, 0.25 * i));
  grid.ps = log_spaced(1.0, 5e4, 20);
  grid.ps.push_back(infinity<double>());
  for (Index k = 1; k <= 20; ++k) grid.ks.push_back(k);
  return grid;
}

GridSpec GridSpec::desk() {
  GridSpec grid;
  for (int i = 4; i <= 12; ++i) grid.alphas.push_back(std::pow(10.0, 0.25 * i));
  grid.ps = {1.0, 1.5, 2.0, 3.0, 5.0, 10.0, infinity<double>()};
  for (Index k = 1; k <= 6; ++k) grid.ks.push_back(k);
  return grid;
}

GridSpec GridSpec::normalized(Index rank_bound) const {
  GridSpec out = *this;
  auto tidy = [](auto& axis, const char* name) {
    if (axis.empty()) throw std::invalid_argument(std::string("grid: empty ") + name + " axis");
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  };
  tidy(out.alphas, "alpha");
  tidy(out.ps, "p");
  tidy(out.ks, "k");
  if (!(out.alphas.front() > 0) || !std::isfinite(out.alphas.back()))
    throw std::invalid_argument("grid: alphas must be positive and finite");
  if (std::isnan(out.ps.back()) || out.ps.front() < 1.0)
    throw std::invalid_argument("grid: p values must lie in [1, inf]");
  if (out.ks.front() < 1) throw std::invalid_argument("grid: k values must be >= 1");
  if (out.ks.back() > rank_bound)
    throw std::invalid_argument("grid: k = " + std::to_string(out.ks.back()) +
                                " exceeds min(d, m) = " + std::to_string(rank_bound));
  return out;
}

std::vector<double> log_spaced(double first, double last, std::size_t count) {
  if (!(first > 0) || !(last >= first) || count == 0)
    throw std::invalid_argument("log_spaced: need 0 < first <= last and count >= 1");
  std::vector<double> out(count);
  const double lo = std::log(first);
  const double hi = std::log(last);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = count == 1 ? first : std::exp(lo + (hi - lo) * double(i) / double(count - 1));
  out.front() = first;
  out.back() = count == 1 ? first : last;
  return out;
}

SolverConfig GridConfig::default_solver() {
  SolverConfig config;
  config.max_iters = 300;
  config.gap_tol = 1e-4;
  config.relative_gap = true;
  config.step_rule = StepRule::exact_line_search_quadratic;
  return config;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::trace: return "trace";
    case Method::ksupport: return "k-supp";
    case Method::kpsupport: return "kp-supp";
  }
  return "unknown";
}

bool in_family(const CellResult& cell, Method method) {
  switch (method) {
    case Method::trace: return is_trace_ball(cell.k, cell.p);
    case Method::ksupport: return cell.p == 2.0;
    case Method::kpsupport: return true;
  }
  return false;
}

std::optional<std::size_t> ExperimentResult::select(Method method) const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!c.ok || !in_family(c, method) || std::isnan(c.val_metric)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = cells[*best];
    if (std::tie(c.val_metric, c.k, c.p, c.alpha) < std::tie(b.val_metric, b.k, b.p, b.alpha)) best = i;
  }
  return best;
}

double score(const CompletionData& data, const MaskedMatrix& split, const Mat& prediction) {
  const Mat clamped = data.range ? threshold_predictions(prediction, *data.range) : prediction;
  if (data.metric == Metric::nmae) {
    if (!data.range) throw std::invalid_argument("score: nmae needs a rating range");
    return nmae(split, clamped, *data.range);
  }
  return relative_error(split, clamped);
}

ExperimentResult run_validation_grid(const CompletionData& data, const GridSpec& grid_in,
                                     const GridConfig& config) {
  const Index rows = data.train.rows();
  const Index cols = data.train.cols();
  for (const auto* split : {&data.validation, &data.test})
    if (split->rows() != rows || split->cols() != cols)
      throw std::invalid_argument("run_validation_grid: splits differ in shape");
  if (data.train.observed_count() == 0 || data.validation.observed_count() == 0 ||
      data.test.observed_count() == 0)
    throw std::invalid_argument("run_validation_grid: every split needs observed entries");
  const GridSpec grid = grid_in.normalized(std::min(rows, cols));

  const MaskedSquaredLoss loss(data.train);
  const Mat zero = Mat::Zero(rows, cols);

  auto solve = [&](const SupportParams<double>& params, const Mat& start, Mat* solution) {
    const PatternSpectralBall ball(loss, params, config.svd);
    Mat x0 = start;
    const double n = ball.norm(x0);
    if (n > ball.radius()) x0 *= ball.radius() / n;
    auto trace = frank_wolfe(loss, ball, x0, config.solver);
    Solved out{trace.iteration_count(), trace.final_gap,
               score(data, data.validation, trace.solution), score(data, data.test, trace.solution)};
    if (solution) *solution = std::move(trace.solution);
    return out;
  };

  // Trace-norm solves, one per alpha, when the grid has trace-norm cells.
  // They also seed the continuation slices; without them slices start at 0.
  const std::size_t n_alpha = grid.alphas.size();
  std::vector<std::optional<Solved>> trace_result(n_alpha);
  std::vector<std::string> trace_error(n_alpha);
  std::vector<Mat> trace_solution(n_alpha, zero);
  const bool has_trace = grid.ks.front() == 1 || grid.ps.front() == 1.0;
  parallel_for(has_trace ? n_alpha : 0, config.threads, [&](std::size_t a) {
    try {
      trace_result[a] = solve(SupportParams<double>(1, 1.0, grid.alphas[a]), zero, &trace_solution[a]);
    } catch (const std::exception& e) {
      trace_error[a] = e.what();
      trace_solution[a] = zero;
    }
  });

  // Continuation in p over each remaining (k, alpha) slice.
  std::vector<Index> slice_ks;
  for (Index k : grid.ks)
    if (k > 1) slice_ks.push_back(k);
  std::vector<double> slice_ps;
  for (double p : grid.ps)
    if (p > 1.0) slice_ps.push_back(p);
  using Key = std::tuple<Index, std::size_t, std::size_t>;  // k, alpha index, p index
  std::map<Key, std::pair<std::optional<Solved>, std::string>> slice_results;
  std::mutex results_mutex;
  const std::size_t n_slices = slice_ps.empty() ? 0 : slice_ks.size() * n_alpha;
  parallel_for(n_slices, config.threads, [&](std::size_t s) {
    const Index k = slice_ks[s / n_alpha];
    const std::size_t a = s % n_alpha;
    Mat current = trace_solution[a];
    for (std::size_t pi = 0; pi < slice_ps.size(); ++pi) {
      std::pair<std::optional<Solved>, std::string> entry;
      try {
        Mat next;
        entry.first = solve(SupportParams<double>(k, slice_ps[pi], grid.alphas[a]), current, &next);
        current = std::move(next);
      } catch (const std::exception& e) {
        entry.second = e.what();
      }
      const std::lock_guard lock(results_mutex);
      slice_results[{k, a, pi}] = std::move(entry);
    }
  });

  ExperimentResult result;
  result.cells.reserve(grid.cell_count());
  for (Index k : grid.ks) {
    for (double p : grid.ps) {
      for (std::size_t a = 0; a < n_alpha; ++a) {
        CellResult cell;
        cell.k = k;
        cell.p = p;
        cell.alpha = grid.alphas[a];
        const std::optional<Solved>* solved;
        const std::string* error;
        if (is_trace_ball(k, p)) {
          solved = &trace_result[a];
          error = &trace_error[a];
        } else {
          const auto pi = static_cast<std::size_t>(
              std::lower_bound(slice_ps.begin(), slice_ps.end(), p) - slice_ps.begin());
          const auto& entry = slice_results.at({k, a, pi});
          solved = &entry.first;
          error = &entry.second;
        }
        if (*solved) {
          cell.ok = true;
          cell.val_metric = (*solved)->val;
          cell.test_metric = (*solved)->test;
          cell.iters = (*solved)->iters;
          cell.gap = (*solved)->gap;
        } else {
          cell.error = *error;
          result.warnings.push_back("cell k=" + std::to_string(k) + " p=" + std::to_string(p) +
                                    " alpha=" + std::to_string(grid.alphas[a]) + " failed: " + *error);
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }
  if (std::none_of(result.cells.begin(), result.cells.end(), [](const CellResult& c) { return c.ok; }))
    throw std::runtime_error("run_validation_grid: every cell failed; first error: " +
                             result.cells.front().error);
  return result;
}

}  // namespace kpsupport::completion
