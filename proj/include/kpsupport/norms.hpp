#pragma once

// Closed-form evaluation of the vector (k,p)-support norm, its dual, the
// dual maximizer and the linear-minimization oracle over its ball.

#include "kpsupport/params.hpp"
#include "kpsupport/sorted_abs.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kpsupport {

namespace detail {

/// l_p norm of nonnegative values, scaled by their maximum so that large p
/// neither overflows nor underflows.
template <typename Scalar>
Scalar scaled_lp(const std::vector<Scalar>& values, Scalar p) {
  Scalar scale = 0;
  for (Scalar v : values) scale = std::max(scale, v);
  if (scale == Scalar(0)) return Scalar(0);
  if (std::isinf(p)) return scale;
  Scalar sum = 0;
  for (Scalar v : values) sum += std::pow(v / scale, p);
  return scale * std::pow(sum, Scalar(1) / p);
}

/// The k largest magnitudes of `u`, in no particular order.
template <typename Derived>
std::vector<typename Derived::Scalar> top_k_magnitudes(const Eigen::MatrixBase<Derived>& u,
                                                       Index k) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> mags(static_cast<std::size_t>(u.size()));
  for (Index i = 0; i < u.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(u[i]);
  std::nth_element(mags.begin(), mags.begin() + (k - 1), mags.end(), std::greater<>());
  mags.resize(static_cast<std::size_t>(k));
  return mags;
}

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& w, const char* what) {
  if (!w.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

/// Value of the restricted problem for a fixed split point `ell` of the sorted
/// magnitudes; `tail_sum` is the sum of z[ell..d).
template <typename Scalar>
Scalar split_value(const Vector<Scalar>& z, Index ell, Scalar tail_sum, Index k, Scalar p) {
  const Index d = z.size();
  const Scalar q = p / (p - Scalar(1));
  std::vector<Scalar> terms(z.data(), z.data() + ell);
  if (ell < d) terms.push_back(tail_sum / std::pow(Scalar(k - ell), Scalar(1) / q));
  return scaled_lp(terms, p);
}

}  // namespace detail

/// Largest ell in {0, ..., k-1} with (k - ell) z_ell >= sum_{i > ell} z_i
/// (1-based z), or d when k = d. ell = 0 is always admissible.
template <typename Derived>
Index critical_index(const Eigen::MatrixBase<Derived>& z, Index k) {
  using Scalar = typename Derived::Scalar;
  const Index d = z.size();
  if (d < 1) throw std::invalid_argument("critical_index: empty vector");
  if (k < 1 || k > d) throw std::invalid_argument("critical_index: k out of range");
  for (Index i = 0; i < d; ++i) {
    if (z[i] < Scalar(0) || (i > 0 && z[i] > z[i - 1]))
      throw std::invalid_argument("critical_index: input must be nonnegative and nonincreasing");
  }
  if (k == d) return d;

  // suffix[j] = z[j] + ... + z[d-1] (0-based), so sum_{i > ell} z_i = suffix[ell].
  std::vector<Scalar> suffix(static_cast<std::size_t>(d) + 1, Scalar(0));
  for (Index j = d - 1; j >= 0; --j)
    suffix[static_cast<std::size_t>(j)] = suffix[static_cast<std::size_t>(j) + 1] + z[j];

  for (Index ell = k - 1; ell >= 1; --ell) {
    if (Scalar(k - ell) * z[ell - 1] >= suffix[static_cast<std::size_t>(ell)]) return ell;
  }
  return 0;
}

template <typename Derived>
Index critical_index(const Eigen::MatrixBase<Derived>& z,
                     const SupportParams<typename Derived::Scalar>& params) {
  return critical_index(z, params.k());
}

template <typename Derived>
typename Derived::Scalar kp_norm(const Eigen::MatrixBase<Derived>& w,
                                 const SupportParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  params.check_dimension(w.size());
  detail::check_finite(w, "kp_norm");
  const Index k = params.k();

  if (params.is_l1() || k == 1) return w.template lpNorm<1>();
  if (params.is_inf())
    return std::max(w.template lpNorm<Eigen::Infinity>(), w.template lpNorm<1>() / Scalar(k));

  const auto view = sort_abs(w);
  const Index ell = critical_index(view.z, k);
  const Scalar tail = ell < w.size() ? view.z.tail(w.size() - ell).sum() : Scalar(0);
  return detail::split_value(view.z, ell, tail, k, params.p());
}

/// l_q norm of the k largest-magnitude components (l_inf when p = 1).
template <typename Derived>
typename Derived::Scalar kp_dual_norm(const Eigen::MatrixBase<Derived>& u,
                                      const SupportParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  params.check_dimension(u.size());
  detail::check_finite(u, "kp_dual_norm");
  if (params.is_l1()) return u.template lpNorm<Eigen::Infinity>();
  const auto top = detail::top_k_magnitudes(u, params.k());
  if (params.is_inf()) {
    Scalar sum = 0;
    for (Scalar v : top) sum += v;
    return sum;
  }
  return detail::scaled_lp(top, params.q());
}

/// A unit-norm w attaining <u, w> = ||u||_*. For p = 1 this is the signed
/// basis vector at the first largest-magnitude entry; for p = inf, entries of
/// the top-k set with u_i = 0 are set to 0.
template <typename Derived>
Vector<typename Derived::Scalar> dual_maximizer(
    const Eigen::MatrixBase<Derived>& u, const SupportParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  params.check_dimension(u.size());
  detail::check_finite(u, "dual_maximizer");
  if (u.isZero(0)) throw std::invalid_argument("dual_maximizer: u = 0 has no unique maximizer");

  const auto view = sort_abs(u);
  Vector<Scalar> w = Vector<Scalar>::Zero(u.size());
  if (params.is_l1()) {
    w[view.perm[0]] = view.signs[view.perm[0]];
    return w;
  }
  const Scalar dual = kp_dual_norm(u, params);
  const Scalar exponent = params.is_inf() ? Scalar(0) : Scalar(1) / (params.p() - Scalar(1));
  for (Index i = 0; i < params.k(); ++i) {
    const Index j = view.perm[static_cast<std::size_t>(i)];
    if (view.z[i] == Scalar(0)) continue;
    w[j] = params.is_inf() ? view.signs[j] : view.signs[j] * std::pow(view.z[i] / dual, exponent);
  }
  return w;
}

/// argmin <s, g> over the ball of radius alpha; zero when g = 0.
template <typename Derived>
Vector<typename Derived::Scalar> lmo_vector(const Eigen::MatrixBase<Derived>& g,
                                            const SupportParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  params.check_dimension(g.size());
  if (g.isZero(0)) return Vector<Scalar>::Zero(g.size());
  return -params.alpha() * dual_maximizer(g, params);
}

template <typename Scalar>
struct NormCertificate {
  Scalar value;
  Vector<Scalar> dual_point;
  Index ell;
};

/// Norm value together with the dual vector u (||u||_* = 1) that attains it.
template <typename Derived>
NormCertificate<typename Derived::Scalar> norm_certificate(
    const Eigen::MatrixBase<Derived>& w, const SupportParams<typename Derived::Scalar>& params) {
  using Scalar = typename Derived::Scalar;
  params.check_dimension(w.size());
  detail::check_finite(w, "norm_certificate");
  if (!params.is_interior())
    throw std::invalid_argument("norm_certificate: requires 1 < p < inf");
  if (w.isZero(0)) throw std::invalid_argument("norm_certificate: w = 0");

  const Index d = w.size();
  const Index k = params.k();
  const Scalar p = params.p();
  const auto view = sort_abs(w);
  const Index ell = critical_index(view.z, k);
  const Scalar tail = ell < d ? view.z.tail(d - ell).sum() : Scalar(0);
  const Scalar value = detail::split_value(view.z, ell, tail, k, p);

  Vector<Scalar> sorted_u(d);
  for (Index i = 0; i < std::min(ell, d); ++i) sorted_u[i] = std::pow(view.z[i] / value, p - 1);
  if (ell < d) {
    const Scalar level = std::pow(tail / (Scalar(k - ell) * value), p - 1);
    sorted_u.tail(d - ell).setConstant(level);
  }
  return {value, view.unsort(sorted_u), ell};
}

}  // namespace kpsupport
