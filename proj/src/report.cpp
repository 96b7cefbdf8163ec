#include "kpsupport/completion/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kpsupport::completion {
namespace {

nlohmann::json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return nullptr;
  return x;
}

double number_from_json(const nlohmann::json& value, const char* key) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_number_or_inf(value.get<std::string>());
  throw std::invalid_argument(std::string("grid file: '") + key + "' entries must be numbers or \"inf\"");
}

}  // namespace

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.13g", x);
  return buffer;
}

double parse_number_or_inf(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return infinity<double>();
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || std::isnan(value))
    throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_cells_csv(std::ostream& out, const ProtocolRun& run) {
  out << "trial,seed,k,p,alpha,val_metric,test_metric,iters,gap,ok,error\r\n";
  for (const auto& trial : run.trials)
    for (const auto& c : trial.result.cells)
      out << trial.trial << ',' << trial.seed << ',' << c.k << ',' << format_number(c.p) << ','
          << format_number(c.alpha) << ',' << (c.ok ? format_number(c.val_metric) : "") << ','
          << (c.ok ? format_number(c.test_metric) : "") << ',' << c.iters << ','
          << (c.ok ? format_number(c.gap) : "") << ',' << (c.ok ? 1 : 0) << ',' << csv_field(c.error)
          << "\r\n";
}

void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& summaries) {
  out << "method,trials,mean_test,std_test,mean_val,mean_k,mean_p\r\n";
  for (const auto& s : summaries)
    out << to_string(s.method) << ',' << s.trials << ',' << format_number(s.mean_test) << ','
        << format_number(s.std_test) << ',' << format_number(s.mean_val) << ','
        << format_number(s.mean_k) << ',' << format_number(s.mean_p) << "\r\n";
}

void write_curve_csv(std::ostream& out, const CurveByP& curve) {
  out << "p,mean_val,mean_test\r\n";
  for (std::size_t i = 0; i < curve.ps.size(); ++i)
    out << format_number(curve.ps[i]) << ',' << format_number(curve.mean_val[i]) << ','
        << format_number(curve.mean_test[i]) << "\r\n";
}

void write_decay_csv(std::ostream& out, const DecaySweep& sweep) {
  out << "a,optimal_p\r\n";
  for (const auto& point : sweep.points)
    out << format_number(point.a) << ',' << format_number(point.optimal_p) << "\r\n";
}

void write_decay_curves_csv(std::ostream& out, const DecaySweep& sweep) {
  out << "a,p,mean_val,mean_test\r\n";
  for (const auto& point : sweep.points)
    for (std::size_t i = 0; i < point.curve.ps.size(); ++i)
      out << format_number(point.a) << ',' << format_number(point.curve.ps[i]) << ','
          << format_number(point.curve.mean_val[i]) << ',' << format_number(point.curve.mean_test[i])
          << "\r\n";
}

GridSpec parse_grid_json(const std::string& text, const GridSpec& defaults) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("grid file: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("grid file: top level must be an object");
  for (const auto& item : doc.items())
    if (item.key() != "alphas" && item.key() != "ps" && item.key() != "ks")
      throw std::invalid_argument("grid file: unknown key '" + item.key() + "'");
  GridSpec grid = defaults;
  auto read = [&](const char* key, auto& axis, auto convert) {
    if (!doc.contains(key)) return;
    const auto& values = doc.at(key);
    if (!values.is_array()) throw std::invalid_argument(std::string("grid file: '") + key + "' must be an array");
    axis.clear();
    for (const auto& v : values) axis.push_back(convert(v, key));
  };
  read("alphas", grid.alphas, number_from_json);
  read("ps", grid.ps, number_from_json);
  read("ks", grid.ks, [](const nlohmann::json& v, const char* key) {
    if (!v.is_number_integer()) throw std::invalid_argument(std::string("grid file: '") + key + "' entries must be integers");
    return v.get<Index>();
  });
  return grid;
}

GridSpec load_grid_file(const std::filesystem::path& path, const GridSpec& defaults) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_grid_json(text.str(), defaults);
}

nlohmann::json to_json(const GridSpec& grid) {
  nlohmann::json out;
  out["alphas"] = grid.alphas;
  out["ps"] = nlohmann::json::array();
  for (double p : grid.ps) out["ps"].push_back(number_json(p));
  out["ks"] = grid.ks;
  return out;
}

nlohmann::json to_json(const std::vector<MethodSummary>& summaries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : summaries)
    out.push_back({{"method", to_string(s.method)},
                   {"trials", s.trials},
                   {"mean_test", number_json(s.mean_test)},
                   {"std_test", number_json(s.std_test)},
                   {"mean_val", number_json(s.mean_val)},
                   {"mean_k", number_json(s.mean_k)},
                   {"mean_p", number_json(s.mean_p)}});
  return out;
}

}  // namespace kpsupport::completion
