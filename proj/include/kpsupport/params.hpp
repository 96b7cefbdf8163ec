#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kpsupport {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

template <typename Scalar>
constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

/// Exponents closer to 1 than this are evaluated with the l1 formulas; the
/// interior formulas raise to 1/(p-1) and lose all precision below it.
template <typename Scalar>
constexpr Scalar kL1Threshold = Scalar(1) + Scalar(1e-8);

/// The (k, p, alpha) triple that selects one member of the (k,p)-support
/// family and the radius of its ball. p may be +infinity.
template <typename Scalar>
class SupportParams {
 public:
  SupportParams(Index k, Scalar p, Scalar alpha = Scalar(1))
      : k_(k), p_(p), alpha_(alpha) {
    if (k < 1) throw std::invalid_argument("SupportParams: k must be >= 1");
    if (std::isnan(p) || p < Scalar(1))
      throw std::invalid_argument("SupportParams: p must lie in [1, inf]");
    if (!(alpha > Scalar(0)) || !std::isfinite(alpha))
      throw std::invalid_argument("SupportParams: alpha must be positive and finite");
  }

  Index k() const { return k_; }
  Scalar p() const { return p_; }
  Scalar alpha() const { return alpha_; }

  /// Conjugate exponent, 1/p + 1/q = 1 with 1/inf = 0.
  Scalar q() const {
    if (is_l1()) return infinity<Scalar>();
    if (is_inf()) return Scalar(1);
    return p_ / (p_ - Scalar(1));
  }

  bool is_inf() const { return std::isinf(p_); }
  bool is_l1() const { return p_ < kL1Threshold<Scalar>; }
  bool is_interior() const { return !is_inf() && !is_l1(); }

  SupportParams with_p(Scalar p) const { return {k_, p, alpha_}; }
  SupportParams with_alpha(Scalar alpha) const { return {k_, p_, alpha}; }

  /// Throws unless 1 <= k <= d.
  void check_dimension(Index d) const {
    if (d < 1) throw std::invalid_argument("empty vector");
    if (k_ > d)
      throw std::invalid_argument("k = " + std::to_string(k_) +
                                  " exceeds dimension " + std::to_string(d));
  }

 private:
  Index k_;
  Scalar p_;
  Scalar alpha_;
};

}  // namespace kpsupport
