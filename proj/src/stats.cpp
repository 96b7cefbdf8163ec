#include "kpsupport/completion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kpsupport::completion {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean: no values");
  return std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
}

double sample_std(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean(x);
  double ss = 0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / double(x.size() - 1));
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * double(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need two equally sized samples of size >= 2");
  for (const auto* v : {&x, &y})
    if (std::any_of(v->begin(), v->end(), [](double t) { return std::isnan(t); }))
      throw std::invalid_argument("spearman: NaN input");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

double paired_sign_flip_pvalue(const std::vector<double>& lhs, const std::vector<double>& rhs,
                               std::size_t samples, std::uint64_t seed) {
  if (lhs.size() != rhs.size() || lhs.empty())
    throw std::invalid_argument("paired_sign_flip_pvalue: need two equally sized nonempty samples");
  std::vector<double> diff(lhs.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = lhs[i] - rhs[i];
  const double observed = std::accumulate(diff.begin(), diff.end(), 0.0);
  // Sums within a relative rounding margin of the observed one count as ties.
  double scale = 0;
  for (double v : diff) scale += std::abs(v);
  const double margin = 1e-12 * scale;

  std::size_t at_most = 0;
  std::size_t total = 0;
  auto tally = [&](double sum) {
    ++total;
    if (sum <= observed + margin) ++at_most;
  };
  const std::size_t n = diff.size();
  if (n <= 20) {
    for (std::uint32_t signs = 0; signs < (std::uint32_t{1} << n); ++signs) {
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += (signs >> i & 1u) ? -diff[i] : diff[i];
      tally(sum);
    }
  } else {
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
      double sum = 0;
      for (double v : diff) sum += (rng() & 1u) ? -v : v;
      tally(sum);
    }
  }
  return double(at_most) / double(total);
}

}  // namespace kpsupport::completion
