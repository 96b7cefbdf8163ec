#pragma once

#include "kpsupport/completion/metrics.hpp"
#include "kpsupport/frank_wolfe.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kpsupport::completion {

/// The (k, p, alpha) values explored by validation.
struct GridSpec {
  std::vector<double> alphas;
  std::vector<double> ps;
  std::vector<Index> ks;

  /// 21 alphas 10^0 .. 10^5 (ratio 10^0.25); 20 log-spaced p in [1, 5e4]
  /// plus infinity; k = 1..20.
  static GridSpec full();

  /// A reduced grid for 100 x 100 problems whose signal has unit-RMS
  /// entries: alphas 10^1 .. 10^3 (ratio 10^0.25), p in {1, 1.5, 2, 3, 5,
  /// 10, inf}, k = 1..6.
  static GridSpec desk();

  /// Sorts each axis ascending, drops duplicates, and checks ranges.
  /// Throws if any k exceeds `rank_bound`.
  GridSpec normalized(Index rank_bound) const;

  std::size_t cell_count() const { return alphas.size() * ps.size() * ks.size(); }
};

/// `count` log-spaced values from `first` to `last` inclusive.
std::vector<double> log_spaced(double first, double last, std::size_t count);

enum class Metric { relative_error, nmae };

/// Train / validation / test views of one matrix. When `range` is set the
/// predictions are clamped into it before scoring.
struct CompletionData {
  MaskedMatrix train;
  MaskedMatrix validation;
  MaskedMatrix test;
  Metric metric = Metric::relative_error;
  std::optional<RatingRange> range;
};

struct GridConfig {
  SolverConfig solver = default_solver();
  /// The LMO only needs the leading singular vectors to moderate accuracy.
  TopKSvdOptions svd{.tolerance = 1e-6};
  /// Worker threads for independent slices; 0 uses the hardware count.
  unsigned threads = 1;

  static SolverConfig default_solver();
};

struct CellResult {
  Index k = 0;
  double p = 0;
  double alpha = 0;
  double val_metric = 0;
  double test_metric = 0;
  int iters = 0;
  double gap = 0;
  bool ok = false;
  std::string error;
};

enum class Method { trace, ksupport, kpsupport };

std::string to_string(Method method);

/// Whether the cell belongs to the family searched by `method`: the trace
/// norm is (k = 1 or p = 1), the k-support norm is p = 2.
bool in_family(const CellResult& cell, Method method);

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::vector<std::string> warnings;

  /// Index of the best successful cell of the family by validation metric;
  /// ties go to the smallest k, then p, then alpha. Empty if none.
  std::optional<std::size_t> select(Method method) const;
};

/// Scores a prediction on one split under the data's metric.
double score(const CompletionData& data, const MaskedMatrix& split, const Mat& prediction);

/// Solves every cell of the grid by Frank-Wolfe and scores it.
/// Cells whose ball is the trace-norm ball (k = 1 or p = 1) share one solve
/// per alpha; every other (k, alpha) slice runs continuation in ascending p
/// from that solve, or from W = 0 when the grid has no trace-norm cells. Failed cells are marked and kept; throws only when every
/// cell fails.
ExperimentResult run_validation_grid(const CompletionData& data, const GridSpec& grid,
                                     const GridConfig& config = {});

}  // namespace kpsupport::completion
