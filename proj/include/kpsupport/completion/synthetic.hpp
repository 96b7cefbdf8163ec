#pragma once

#include "kpsupport/completion/masked.hpp"

#include <cstdint>
#include <optional>

namespace kpsupport::completion {

/// Independent, reproducible seed for a named sub-stream of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// A d x m synthetic matrix: the noise-free low-rank part and the observed
/// matrix signal + noise.
struct SyntheticMatrix {
  Mat signal;
  Mat observed;
};

/// Rank-r signal A diag(s) B^T where A and B are the singular vectors of
/// U V^T for standard Gaussian U (d x r) and V (m x r), and s is `spectrum`
/// rescaled so that ||signal||_F = sqrt(d m). Noise is i.i.d. Gaussian with
/// standard deviation noise_scale.
SyntheticMatrix generate_with_spectrum(Index d, Index m, const Vector<double>& spectrum,
                                       double noise_scale, std::uint64_t seed);

/// r equal singular values.
SyntheticMatrix generate_flat(Index d, Index m, Index r, double noise_scale, std::uint64_t seed);

/// Singular values proportional to exp(-l a), l = 1..r.
SyntheticMatrix generate_decay(Index d, Index m, Index r, double a, std::uint64_t seed,
                               double noise_scale = 0.0);

/// U V^T + noise_scale E with U, V, E standard Gaussian and no rescaling.
SyntheticMatrix generate_lowrank(Index d, Index m, Index r, std::uint64_t seed,
                                 double noise_scale = 1.0);

struct MaskSpec {
  enum class Kind { uniform_fraction, per_row_count, per_row_fraction };
  Kind kind = Kind::uniform_fraction;
  double fraction = 1.0;
  Index count = 0;

  static MaskSpec uniform(double fraction) { return {Kind::uniform_fraction, fraction, 0}; }
  static MaskSpec per_row(Index count) { return {Kind::per_row_count, 1.0, count}; }
  static MaskSpec per_row_share(double fraction) { return {Kind::per_row_fraction, fraction, 0}; }
};

/// Samples entries among `available` (all entries when absent).
///   uniform_fraction: exactly floor(fraction * #available) entries overall.
///   per_row_count:    exactly `count` entries in every row.
///   per_row_fraction: floor(fraction * #available in row) entries per row.
Mask sample_mask(Index d, Index m, const MaskSpec& spec, std::uint64_t seed,
                 const std::optional<Mask>& available = std::nullopt);

struct SampleSplit {
  Mask train;
  Mask validation;
};

/// Moves floor(fraction * #sample) uniformly chosen entries of `sample` into a
/// disjoint validation mask.
SampleSplit carve_validation(const Mask& sample, double fraction, std::uint64_t seed);

}  // namespace kpsupport::completion
