#pragma once

#include "kpsupport/completion/protocol.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>

namespace kpsupport::completion {

/// printf "%.13g"; infinities print as "inf" and "-inf".
std::string format_number(double x);

/// Parses a number or "inf" / "infinity" (any case). Throws on anything else.
double parse_number_or_inf(const std::string& text);

/// RFC 4180 quoting: fields containing a comma, quote or line break are
/// wrapped in quotes with inner quotes doubled.
std::string csv_field(const std::string& field);

/// trial,seed,k,p,alpha,val_metric,test_metric,iters,gap,ok,error
void write_cells_csv(std::ostream& out, const ProtocolRun& run);
/// method,trials,mean_test,std_test,mean_val,mean_k,mean_p
void write_summary_csv(std::ostream& out, const std::vector<MethodSummary>& summaries);
/// p,mean_val,mean_test
void write_curve_csv(std::ostream& out, const CurveByP& curve);
/// a,optimal_p
void write_decay_csv(std::ostream& out, const DecaySweep& sweep);
/// a,p,mean_val,mean_test for every decay rate
void write_decay_curves_csv(std::ostream& out, const DecaySweep& sweep);

/// {"alphas": [...], "ps": [..., "inf"], "ks": [...]}; every key optional,
/// missing keys keep the value from `defaults`.
GridSpec parse_grid_json(const std::string& text, const GridSpec& defaults);
GridSpec load_grid_file(const std::filesystem::path& path, const GridSpec& defaults);
nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const std::vector<MethodSummary>& summaries);

}  // namespace kpsupport::completion
