#pragma once

// Brute-force reference computations for testing the closed forms. They work
// from the definitions (group decomposition, extreme points, alternating
// projections) and share no code with norms.hpp or projection.hpp.

#include "kpsupport/params.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace kpsupport::oracle {

/// Every subset of {0, ..., d-1} with 1 to k elements, in lexicographic
/// order within each size.
class GroupSystem {
 public:
  GroupSystem(Index d, Index k) {
    if (d < 1 || k < 1 || k > d) throw std::invalid_argument("GroupSystem: need 1 <= k <= d");
    std::vector<Index> current;
    for (Index size = 1; size <= k; ++size) enumerate(d, size, 0, current);
  }

  const std::vector<std::vector<Index>>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }

  static std::size_t expected_size(Index d, Index k) {
    std::size_t total = 0;
    for (Index j = 1; j <= k; ++j) {
      double c = 1;
      for (Index i = 0; i < j; ++i) c = c * double(d - i) / double(i + 1);
      total += static_cast<std::size_t>(std::llround(c));
    }
    return total;
  }

 private:
  void enumerate(Index d, Index size, Index from, std::vector<Index>& current) {
    if (static_cast<Index>(current.size()) == size) {
      groups_.push_back(current);
      return;
    }
    for (Index i = from; i < d; ++i) {
      current.push_back(i);
      enumerate(d, size, i + 1, current);
      current.pop_back();
    }
  }

  std::vector<std::vector<Index>> groups_;
};

namespace detail {

inline double plain_lp(const std::vector<double>& v, double p) {
  if (std::isinf(p)) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double s = 0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s, 1.0 / p);
}

inline double conjugate(double p) {
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

}  // namespace detail

/// Maximum of the l_q norm of u over all size-k coordinate subsets, i.e. the
/// support function of the extreme points { card <= k, ||w||_p <= 1 }.
inline double bruteforce_dual(const Vector<double>& u, Index k, double p) {
  const Index d = u.size();
  if (d > 20) throw std::invalid_argument("bruteforce_dual: d must be <= 20");
  if (k < 1 || k > d) throw std::invalid_argument("bruteforce_dual: k out of range");
  const double q = detail::conjugate(p);

  double best = 0;
  std::vector<bool> chosen(static_cast<std::size_t>(d), false);
  std::fill(chosen.begin(), chosen.begin() + k, true);
  std::vector<double> restricted;
  do {
    restricted.clear();
    for (Index i = 0; i < d; ++i)
      if (chosen[static_cast<std::size_t>(i)]) restricted.push_back(u[i]);
    best = std::max(best, detail::plain_lp(restricted, q));
  } while (std::prev_permutation(chosen.begin(), chosen.end()));
  return best;
}

struct InfconvConfig {
  long iterations = 200000;
  /// The run is split into epochs; each restarts from the best decomposition
  /// found so far with the step scale multiplied by epoch_decay. Within an
  /// epoch the step at local iteration t is scale * ||w||_2 / sqrt(t + 1).
  int epochs = 8;
  double step_scale = 0.5;
  double epoch_decay = 0.5;
};

/// Upper bound on the norm from its definition as an infimal convolution:
/// projected subgradient descent on sum_g ||v_g||_p over decompositions
/// sum_g v_g = w with supp(v_g) in g. Every iterate is feasible, so the best
/// objective seen is a certified upper bound.
inline double infconv_upper(const Vector<double>& w, Index k, double p,
                            const InfconvConfig& config = {}) {
  const Index d = w.size();
  if (d > 5 || k > 3) throw std::invalid_argument("infconv_upper: requires d <= 5 and k <= 3");
  if (!(p > 1.0)) throw std::invalid_argument("infconv_upper: requires p > 1");
  if (config.iterations < 100000)
    throw std::invalid_argument("infconv_upper: needs at least 1e5 iterations");

  const GroupSystem system(d, k);
  const auto& groups = system.groups();
  std::vector<std::vector<double>> v(groups.size());
  std::vector<double> multiplicity(static_cast<std::size_t>(d), 0.0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    v[g].assign(groups[g].size(), 0.0);
    for (Index i : groups[g]) multiplicity[static_cast<std::size_t>(i)] += 1.0;
  }
  // Start from the singleton decomposition, whose value is ||w||_1.
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (groups[g].size() == 1) v[g][0] = w[groups[g][0]];

  auto objective = [&] {
    double total = 0;
    for (const auto& block : v) total += detail::plain_lp(block, p);
    return total;
  };
  auto project_onto_constraint = [&] {
    std::vector<double> residual(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) residual[static_cast<std::size_t>(i)] = -w[i];
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t j = 0; j < groups[g].size(); ++j)
        residual[static_cast<std::size_t>(groups[g][j])] += v[g][j];
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t j = 0; j < groups[g].size(); ++j) {
        const auto i = static_cast<std::size_t>(groups[g][j]);
        v[g][j] -= residual[i] / multiplicity[i];
      }
  };

  const double w_norm = w.norm();
  if (w_norm == 0.0) return 0.0;
  double best = objective();
  auto best_v = v;
  std::vector<double> subgradient;
  const int epochs = std::max(1, config.epochs);
  const long epoch_length = config.iterations / epochs;
  double scale = config.step_scale;
  for (long t = 0, local = 0; t < config.iterations; ++t, ++local) {
    if (local == epoch_length) {
      local = 0;
      scale *= config.epoch_decay;
      v = best_v;
    }
    const double step = scale * w_norm / std::sqrt(double(local + 1));
    for (auto& block : v) {
      const double n = detail::plain_lp(block, p);
      if (n == 0.0) continue;
      subgradient.assign(block.size(), 0.0);
      if (std::isinf(p)) {
        const auto it = std::max_element(block.begin(), block.end(),
                                         [](double a, double b) { return std::abs(a) < std::abs(b); });
        const auto j = static_cast<std::size_t>(it - block.begin());
        subgradient[j] = *it > 0 ? 1.0 : -1.0;
      } else {
        for (std::size_t j = 0; j < block.size(); ++j) {
          const double a = std::abs(block[j]) / n;
          subgradient[j] = (block[j] < 0 ? -1.0 : 1.0) * std::pow(a, p - 1.0);
        }
      }
      for (std::size_t j = 0; j < block.size(); ++j) block[j] -= step * subgradient[j];
    }
    project_onto_constraint();
    const double value = objective();
    if (value < best) {
      best = value;
      best_v = v;
    }
  }
  return best;
}

/// Lower bound on the norm by duality: max over candidate dual vectors u of
/// <u, w> / ||u||_*, with the dual norm evaluated by brute force. The
/// candidates are the Holder maximizers of the restricted problems that
/// equalize the dual vector beyond each split point ell.
inline double certificate_lower(const Vector<double>& w, Index k, double p) {
  const Index d = w.size();
  if (w.isZero(0)) throw std::invalid_argument("certificate_lower: w = 0");
  if (k < 1 || k > d) throw std::invalid_argument("certificate_lower: k out of range");
  if (!(p > 1.0) || std::isinf(p))
    throw std::invalid_argument("certificate_lower: requires 1 < p < inf");
  const double q = detail::conjugate(p);

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return std::abs(w[a]) > std::abs(w[b]); });

  std::vector<Index> splits;
  for (Index ell = 0; ell < k; ++ell) splits.push_back(ell);
  if (k == d) splits.push_back(d);

  double best = 0;
  for (Index ell : splits) {
    double tail = 0;
    for (Index i = ell; i < d; ++i) tail += std::abs(w[order[static_cast<std::size_t>(i)]]);
    std::vector<double> holder_vector;
    for (Index i = 0; i < ell; ++i) holder_vector.push_back(std::abs(w[order[static_cast<std::size_t>(i)]]));
    if (ell < d) holder_vector.push_back(tail / std::pow(double(k - ell), 1.0 / q));
    const double m = detail::plain_lp(holder_vector, p);
    if (m == 0.0) continue;

    Vector<double> u(d);
    for (Index i = 0; i < d; ++i) {
      const Index j = order[static_cast<std::size_t>(i)];
      const double magnitude = i < ell ? std::pow(std::abs(w[j]) / m, p - 1.0)
                                       : std::pow(tail / (double(k - ell) * m), p - 1.0);
      u[j] = (w[j] < 0 ? -1.0 : 1.0) * magnitude;
    }
    const double dual = bruteforce_dual(u, k, p);
    if (dual > 0) best = std::max(best, u.dot(w) / dual);
  }
  return best;
}

namespace detail {

inline Vector<double> project_box(const Vector<double>& x, double bound) {
  return x.cwiseMax(-bound).cwiseMin(bound);
}

/// Sort-based Euclidean projection onto { ||x||_1 <= radius }.
inline Vector<double> project_l1_ball(const Vector<double>& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  std::vector<double> mags(x.data(), x.data() + x.size());
  for (double& m : mags) m = std::abs(m);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0;
  double theta = 0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - radius) / double(j + 1);
    if (mags[j] > candidate) theta = candidate;
  }
  Vector<double> out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double m = std::max(std::abs(x[i]) - theta, 0.0);
    out[i] = x[i] < 0 ? -m : m;
  }
  return out;
}

}  // namespace detail

/// Dykstra's alternating projections onto the box |x_i| <= alpha and the l1
/// ball of radius k alpha, whose intersection is the (k, inf) ball.
inline Vector<double> dykstra_project(const Vector<double>& w, Index k, double alpha,
                                      long iterations = 20000) {
  if (iterations < 10000) throw std::invalid_argument("dykstra_project: needs >= 1e4 iterations");
  Vector<double> x = w;
  Vector<double> box_increment = Vector<double>::Zero(w.size());
  Vector<double> ball_increment = Vector<double>::Zero(w.size());
  for (long t = 0; t < iterations; ++t) {
    const Vector<double> y = detail::project_box(x + box_increment, alpha);
    box_increment = x + box_increment - y;
    const Vector<double> next = detail::project_l1_ball(y + ball_increment, double(k) * alpha);
    ball_increment = y + ball_increment - next;
    const bool settled = (next - x).lpNorm<Eigen::Infinity>() == 0.0 &&
                         (next - y).lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + alpha);
    x = next;
    if (settled) break;
  }
  return x;
}

}  // namespace kpsupport::oracle
