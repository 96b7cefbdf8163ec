#pragma once

#include <cstdint>
#include <vector>

namespace kpsupport::completion {

double mean(const std::vector<double>& x);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(const std::vector<double>& x);

/// Ranks starting at 1, tied values sharing the average of their ranks.
/// Infinite values rank above all finite ones.
std::vector<double> average_ranks(const std::vector<double>& x);

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// One-sided paired sign-flip permutation test of H1: mean(lhs - rhs) < 0.
/// Returns the fraction of sign assignments whose mean difference is at most
/// the observed one. Exact for up to 20 pairs, otherwise `samples` random
/// assignments drawn from `seed`.
double paired_sign_flip_pvalue(const std::vector<double>& lhs, const std::vector<double>& rhs,
                               std::size_t samples = 200000, std::uint64_t seed = 1);

}  // namespace kpsupport::completion
