#pragma once

// Orthogonally invariant lift of the vector norms: every quantity is the
// vector quantity applied to the singular values.

#include "kpsupport/norms.hpp"
#include "kpsupport/projection.hpp"
#include "kpsupport/svd.hpp"

namespace kpsupport {

template <typename Derived>
Vector<typename Derived::Scalar> singular_values(const Eigen::MatrixBase<Derived>& W) {
  using Scalar = typename Derived::Scalar;
  if (W.size() == 0) throw std::invalid_argument("singular_values: empty matrix");
  if (!W.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  Eigen::BDCSVD<Matrix<Scalar>> svd(W.eval());
  return svd.singularValues();
}

template <typename Derived>
typename Derived::Scalar spectral_kp_norm(const Eigen::MatrixBase<Derived>& W,
                                          const SupportParams<typename Derived::Scalar>& params) {
  return kp_norm(singular_values(W), params);
}

template <typename Derived>
typename Derived::Scalar spectral_kp_dual_norm(
    const Eigen::MatrixBase<Derived>& W, const SupportParams<typename Derived::Scalar>& params) {
  return kp_dual_norm(singular_values(W), params);
}

/// argmin <S, G>_F over the spectral ball: U_k diag(s) V_k^T where s is the
/// vector oracle applied to the k leading singular values of G.
template <typename Op>
Matrix<typename Op::Scalar> lmo_spectral(const Op& G,
                                         const SupportParams<typename Op::Scalar>& params,
                                         const TopKSvdOptions& options = {}) {
  using Scalar = typename Op::Scalar;
  params.check_dimension(std::min(G.rows(), G.cols()));
  const auto t = top_k_svd(G, params.k(), options);
  if (t.sigma[0] == Scalar(0)) return Matrix<Scalar>::Zero(G.rows(), G.cols());
  const Vector<Scalar> s = lmo_vector(t.sigma, params);
  return t.U * s.asDiagonal() * t.V.transpose();
}

/// Euclidean projection onto { W : ||W||_(k,inf) <= alpha } through a full SVD.
template <typename Derived>
Matrix<typename Derived::Scalar> project_spectral_kinf(const Eigen::MatrixBase<Derived>& W,
                                                       Index k,
                                                       typename Derived::Scalar alpha) {
  const auto t = full_svd(W);
  if (k < 1 || k > t.sigma.size())
    throw std::invalid_argument("project_spectral_kinf: k out of range");
  const auto projected = project_kinf(t.sigma, k, alpha);
  return t.U * projected.x.asDiagonal() * t.V.transpose();
}

}  // namespace kpsupport
