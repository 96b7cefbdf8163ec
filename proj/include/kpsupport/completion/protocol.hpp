#pragma once

#include "kpsupport/completion/grid.hpp"
#include "kpsupport/completion/ratings.hpp"
#include "kpsupport/completion/synthetic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kpsupport::completion {

enum class SyntheticKind { flat, decay, lowrank };

std::string to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(const std::string& name);

/// Noise level used when a protocol does not set one: 1 for lowrank, where
/// E is standard Gaussian, and 0.25 relative to unit-RMS signal entries
/// otherwise.
double default_noise(SyntheticKind kind);

struct SyntheticProtocol {
  SyntheticKind kind = SyntheticKind::flat;
  Index d = 100;
  Index m = 100;
  Index r = 5;
  /// Decay rate, decay protocol only.
  double a = 0.0;
  /// Fraction of entries sampled for training and validation.
  double rho = 0.2;
  std::optional<double> noise_scale;
  /// Share of the sample held out for validation.
  double validation_fraction = 0.1;
  int trials = 1;
  std::uint64_t seed = 0;

  double noise() const { return noise_scale ? *noise_scale : default_noise(kind); }
  /// Throws std::invalid_argument on infeasible parameters.
  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  ExperimentResult result;
};

struct ProtocolRun {
  std::vector<TrialRecord> trials;
  std::vector<std::string> warnings;
};

/// Seed of trial `trial` under master seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

/// Generate, sample, carve validation, run the grid; once per trial. The test
/// split is every entry outside the sample, scored against the generated
/// (noisy) matrix by relative error.
ProtocolRun run_synthetic(const SyntheticProtocol& protocol, const GridSpec& grid,
                          const GridConfig& config = {});

struct RealProtocol {
  MaskSpec sampling = MaskSpec::uniform(0.5);
  double validation_fraction = 0.1;
  int trials = 1;
  std::uint64_t seed = 0;
  /// Train, validate and test on all ratings.
  bool sanity = false;

  void validate() const;
};

/// MovieLens: 50% of all ratings uniformly for training.
RealProtocol movielens_protocol();
/// Jester: `per_user` ratings of every user for training.
RealProtocol jester_protocol(Index per_user);

/// The ratings protocol with NMAE on thresholded predictions. Under a
/// per-row count, users with fewer ratings than the count are dropped with a
/// warning.
ProtocolRun run_real(const RatingsTable& table, const RealProtocol& protocol, const GridSpec& grid,
                     const GridConfig& config = {});

struct MethodSummary {
  Method method = Method::trace;
  std::size_t trials = 0;
  double mean_val = 0;
  double mean_test = 0;
  double std_test = 0;
  double mean_k = 0;
  /// Infinite when any trial selected p = infinity.
  double mean_p = 0;
  /// Selected test metric of each trial, in trial order.
  std::vector<double> test;
};

std::vector<MethodSummary> summarize(const ProtocolRun& run);

/// For each p of the grid: the validation and test metric of the best cell
/// with that p, averaged over trials.
struct CurveByP {
  std::vector<double> ps;
  std::vector<double> mean_val;
  std::vector<double> mean_test;

  /// The p with the smallest mean validation metric; ties go to the smaller p.
  double optimal_p() const;
};

CurveByP curve_by_p(const ProtocolRun& run);

struct DecayPoint {
  double a = 0;
  double optimal_p = 0;
  CurveByP curve;
};

struct DecaySweep {
  std::vector<DecayPoint> points;
  /// Spearman correlation between a and the optimal p.
  double spearman = 0;
  /// Adjacent pairs (in increasing a) where the optimal p increases.
  int inversions = 0;
};

/// Runs the decay protocol of `base` once per decay rate.
DecaySweep run_decay_sweep(const SyntheticProtocol& base, const std::vector<double>& decays,
                           const GridSpec& grid, const GridConfig& config = {});

}  // namespace kpsupport::completion
