#include "kpsupport/completion/synthetic.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kpsupport::completion {
namespace {

constexpr std::uint64_t kFactorStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

Mat gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

void check_rank(Index d, Index m, Index r) {
  if (d < 1 || m < 1) throw std::invalid_argument("generator: empty shape");
  if (r < 1 || r > std::min(d, m))
    throw std::invalid_argument("generator: rank must lie in [1, min(d, m)]");
}

Mat noise(Index d, Index m, double noise_scale, std::uint64_t seed) {
  if (noise_scale < 0) throw std::invalid_argument("generator: noise_scale must be >= 0");
  if (noise_scale == 0) return Mat::Zero(d, m);
  std::mt19937_64 rng(derive_seed(seed, kNoiseStream));
  return noise_scale * gaussian(d, m, rng);
}

std::vector<Index> shuffled_prefix(std::vector<Index> pool, std::size_t count, std::mt19937_64& rng) {
  // Partial Fisher-Yates: the first `count` slots become a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t{words[0]} << 32) | words[1];
}

SyntheticMatrix generate_with_spectrum(Index d, Index m, const Vector<double>& spectrum,
                                       double noise_scale, std::uint64_t seed) {
  const Index r = spectrum.size();
  check_rank(d, m, r);
  if ((spectrum.array() <= 0).any() || !spectrum.allFinite())
    throw std::invalid_argument("generator: spectrum entries must be positive");

  std::mt19937_64 rng(derive_seed(seed, kFactorStream));
  const Mat U = gaussian(d, r, rng);
  const Mat V = gaussian(m, r, rng);
  // U V^T = Qu (Ru Rv^T) Qv^T, so its singular vectors come from an r x r SVD.
  const Eigen::HouseholderQR<Mat> qu(U);
  const Eigen::HouseholderQR<Mat> qv(V);
  const Mat Qu = qu.householderQ() * Mat::Identity(d, r);
  const Mat Qv = qv.householderQ() * Mat::Identity(m, r);
  const Mat Ru = qu.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Mat Rv = qv.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<Mat> core(Ru * Rv.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat A = Qu * core.matrixU();
  const Mat B = Qv * core.matrixV();

  const Vector<double> s = spectrum * (std::sqrt(double(d) * double(m)) / spectrum.norm());
  SyntheticMatrix out;
  out.signal = A * s.asDiagonal() * B.transpose();
  out.observed = out.signal + noise(d, m, noise_scale, seed);
  return out;
}

SyntheticMatrix generate_flat(Index d, Index m, Index r, double noise_scale, std::uint64_t seed) {
  check_rank(d, m, r);
  return generate_with_spectrum(d, m, Vector<double>::Ones(r), noise_scale, seed);
}

SyntheticMatrix generate_decay(Index d, Index m, Index r, double a, std::uint64_t seed,
                               double noise_scale) {
  check_rank(d, m, r);
  if (!(a >= 0) || !std::isfinite(a)) throw std::invalid_argument("generate_decay: a must be >= 0");
  Vector<double> spectrum(r);
  // exp(-l a) / exp(-a): the common factor is removed by the rescaling anyway.
  for (Index l = 0; l < r; ++l) spectrum[l] = std::exp(-double(l) * a);
  return generate_with_spectrum(d, m, spectrum, noise_scale, seed);
}

SyntheticMatrix generate_lowrank(Index d, Index m, Index r, std::uint64_t seed, double noise_scale) {
  check_rank(d, m, r);
  std::mt19937_64 rng(derive_seed(seed, kFactorStream));
  const Mat U = gaussian(d, r, rng);
  const Mat V = gaussian(m, r, rng);
  SyntheticMatrix out;
  out.signal = U * V.transpose();
  out.observed = out.signal + noise(d, m, noise_scale, seed);
  return out;
}

Mask sample_mask(Index d, Index m, const MaskSpec& spec, std::uint64_t seed,
                 const std::optional<Mask>& available) {
  if (d < 1 || m < 1) throw std::invalid_argument("sample_mask: empty shape");
  if (available && (available->rows() != d || available->cols() != m))
    throw std::invalid_argument("sample_mask: availability mask has the wrong shape");
  const bool fractional = spec.kind != MaskSpec::Kind::per_row_count;
  if (fractional && !(spec.fraction > 0 && spec.fraction <= 1))
    throw std::invalid_argument("sample_mask: fraction must lie in (0, 1]");
  auto is_available = [&](Index i, Index j) { return !available || (*available)(i, j); };

  std::mt19937_64 rng(seed);
  Mask mask = Mask::Constant(d, m, false);
  if (spec.kind == MaskSpec::Kind::uniform_fraction) {
    std::vector<Index> pool;
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < d; ++i)
        if (is_available(i, j)) pool.push_back(j * d + i);
    const auto count = static_cast<std::size_t>(std::floor(spec.fraction * double(pool.size())));
    for (Index flat : shuffled_prefix(std::move(pool), count, rng)) mask(flat % d, flat / d) = true;
    return mask;
  }

  for (Index i = 0; i < d; ++i) {
    std::vector<Index> pool;
    for (Index j = 0; j < m; ++j)
      if (is_available(i, j)) pool.push_back(j);
    std::size_t count;
    if (spec.kind == MaskSpec::Kind::per_row_count) {
      if (spec.count < 0 || static_cast<std::size_t>(spec.count) > pool.size())
        throw std::invalid_argument("sample_mask: row " + std::to_string(i) + " has " +
                                    std::to_string(pool.size()) + " available entries, " +
                                    std::to_string(spec.count) + " requested");
      count = static_cast<std::size_t>(spec.count);
    } else {
      count = static_cast<std::size_t>(std::floor(spec.fraction * double(pool.size())));
    }
    for (Index j : shuffled_prefix(std::move(pool), count, rng)) mask(i, j) = true;
  }
  return mask;
}

SampleSplit carve_validation(const Mask& sample, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0 && fraction < 1))
    throw std::invalid_argument("carve_validation: fraction must lie in [0, 1)");
  SampleSplit split{sample, Mask::Constant(sample.rows(), sample.cols(), false)};
  if (fraction == 0) return split;
  const Mask validation = sample_mask(sample.rows(), sample.cols(), MaskSpec::uniform(fraction), seed, sample);
  split.validation = validation;
  split.train = sample && !validation;
  return split;
}

}  // namespace kpsupport::completion
