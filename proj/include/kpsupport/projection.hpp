#pragma once

// Euclidean projection onto the (k, inf)-support ball
//   { x : |x_i| <= alpha, sum_i |x_i| <= k alpha }.

#include "kpsupport/params.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace kpsupport {

template <typename Scalar>
struct ProjectionResult {
  Vector<Scalar> x;
  /// Multiplier of the l1 constraint. When the constraint is active the set
  /// of valid multipliers may be an interval; this is its left end.
  Scalar beta = 0;
  bool active_l1 = false;
};

namespace detail {

/// Smallest beta >= 0 with sum_i clamp(a_i - beta, 0, 1) = k, assuming the
/// sum exceeds k at beta = 0. The map is piecewise linear and nonincreasing
/// with kinks at a_i - 1 and a_i, so one sweep over the sorted kinks finds
/// the crossing exactly.
template <typename Scalar>
Scalar l1_multiplier(const Vector<Scalar>& a, Scalar k, Scalar sum_at_zero) {
  std::vector<std::pair<Scalar, int>> kinks;
  kinks.reserve(static_cast<std::size_t>(2 * a.size()));
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] <= Scalar(0)) continue;
    kinks.emplace_back(std::max(a[i] - Scalar(1), Scalar(0)), +1);
    kinks.emplace_back(a[i], -1);
  }
  std::sort(kinks.begin(), kinks.end());

  Scalar beta = 0;
  Scalar value = sum_at_zero;
  int slope = 0;
  for (const auto& [position, delta] : kinks) {
    const Scalar next = value - Scalar(slope) * (position - beta);
    if (slope > 0 && next <= k) return beta + (value - k) / Scalar(slope);
    value = next;
    beta = position;
    slope += delta;
  }
  // Unreachable for sum_at_zero > k: the map vanishes past the last kink.
  return beta;
}

}  // namespace detail

/// Projection onto { |x_i| <= 1, sum |x_i| <= k }.
///
/// x_i = sign(w_i) clamp(|w_i| - beta, 0, 1). Entries with |w_i| < beta are
/// zeroed, which is what stationarity of the Lagrangian requires there.
template <typename Derived>
ProjectionResult<typename Derived::Scalar> project_unit_kinf(const Eigen::MatrixBase<Derived>& w,
                                                              Index k) {
  using Scalar = typename Derived::Scalar;
  const Index d = w.size();
  if (d < 1) throw std::invalid_argument("project_unit_kinf: empty vector");
  if (k < 1 || k > d) throw std::invalid_argument("project_unit_kinf: k out of range");
  if (!w.allFinite()) throw std::invalid_argument("project_unit_kinf: non-finite input");

  const Vector<Scalar> a = w.cwiseAbs();
  const Scalar clamped_sum = a.cwiseMin(Scalar(1)).sum();

  ProjectionResult<Scalar> result;
  if (clamped_sum > Scalar(k)) {
    result.active_l1 = true;
    result.beta = detail::l1_multiplier(a, Scalar(k), clamped_sum);
  }
  result.x.resize(d);
  for (Index i = 0; i < d; ++i) {
    const Scalar magnitude = std::clamp(a[i] - result.beta, Scalar(0), Scalar(1));
    result.x[i] = w[i] < Scalar(0) ? -magnitude : magnitude;
  }
  return result;
}

/// Projection onto the radius-alpha ball, by rescaling to the unit ball.
template <typename Derived>
ProjectionResult<typename Derived::Scalar> project_kinf(const Eigen::MatrixBase<Derived>& w,
                                                         Index k,
                                                         typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  if (!(alpha > Scalar(0)) || !std::isfinite(alpha))
    throw std::invalid_argument("project_kinf: alpha must be positive");
  auto result = project_unit_kinf((w / alpha).eval(), k);
  result.x *= alpha;
  result.beta *= alpha;
  return result;
}

}  // namespace kpsupport
