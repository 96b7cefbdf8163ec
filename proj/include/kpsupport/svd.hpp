#pragma once

#include "kpsupport/params.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kpsupport {

/// U diag(sigma) V^T with orthonormal columns and sigma nonincreasing.
template <typename Scalar>
struct SingularTriplets {
  Matrix<Scalar> U;
  Vector<Scalar> sigma;
  Matrix<Scalar> V;

  Index rank_bound() const { return sigma.size(); }
  Matrix<Scalar> reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
};

enum class SvdMethod { automatic, dense, lanczos };

struct TopKSvdOptions {
  SvdMethod method = SvdMethod::automatic;
  /// A Ritz triplet is accepted once ||A^T u - sigma v|| <= tolerance * sigma_1.
  double tolerance = 1e-13;
  /// Matrices with min(rows, cols) at or below this size use the dense path
  /// under SvdMethod::automatic.
  Index dense_cutoff = 16;
  unsigned long long seed = 0x6b70737570ULL;
};

namespace detail {

/// Flips each (u_j, v_j) pair so that the first entry of u_j that is not
/// negligible is positive.
template <typename Scalar>
void canonicalize_signs(SingularTriplets<Scalar>& t) {
  for (Index j = 0; j < t.U.cols(); ++j) {
    for (Index i = 0; i < t.U.rows(); ++i) {
      const Scalar x = t.U(i, j);
      if (std::abs(x) > Scalar(1e-10)) {
        if (x < Scalar(0)) {
          t.U.col(j) *= Scalar(-1);
          t.V.col(j) *= Scalar(-1);
        }
        break;
      }
    }
  }
}

template <typename Scalar, typename Rng>
Vector<Scalar> gaussian_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) v[i] = Scalar(normal(rng));
  return v;
}

/// Two passes of classical Gram-Schmidt against the first `count` columns.
template <typename Scalar>
void reorthogonalize(Vector<Scalar>& x, const Matrix<Scalar>& basis, Index count) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const auto block = basis.leftCols(count);
    x.noalias() -= block * (block.transpose() * x);
  }
}

/// A unit vector orthogonal to the first `count` columns of `basis`.
template <typename Scalar, typename Rng>
Vector<Scalar> fresh_direction(const Matrix<Scalar>& basis, Index count, Rng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vector<Scalar> x = gaussian_vector<Scalar>(basis.rows(), rng);
    reorthogonalize(x, basis, count);
    const Scalar n = x.norm();
    if (n > Scalar(1e-8)) return x / n;
  }
  throw std::runtime_error("top_k_svd: failed to extend Krylov basis");
}

/// Eigenvectors of the symmetric tridiagonal matrix (diag, sub) for the given
/// eigenvalues by inverse iteration. Vectors are orthogonalized against the
/// ones already computed, which separates clustered eigenvalues.
template <typename Scalar>
Matrix<Scalar> tridiagonal_eigenvectors(const Vector<Scalar>& diag, const Vector<Scalar>& sub,
                                        const Vector<Scalar>& values) {
  const Index n = diag.size();
  const Index count = values.size();
  Matrix<Scalar> out(n, count);
  if (n == 1) {
    out.setOnes();
    return out;
  }
  Scalar norm = 0;
  for (Index i = 0; i < n; ++i)
    norm = std::max(norm, std::abs(diag[i]) + (i > 0 ? std::abs(sub[i - 1]) : Scalar(0)) +
                              (i + 1 < n ? std::abs(sub[i]) : Scalar(0)));
  const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::max(norm, Scalar(1e-300));

  Vector<Scalar> d(n), du(n - 1), dl(n - 1), du2(n - 1), x(n);
  std::vector<bool> swapped(n - 1);
  for (Index j = 0; j < count; ++j) {
    // LU with partial pivoting of T - lambda I.
    d = diag.array() - values[j];
    du = sub;
    dl = sub;
    du2.setZero();
    for (Index i = 0; i + 1 < n; ++i) {
      swapped[i] = std::abs(d[i]) < std::abs(dl[i]);
      if (!swapped[i]) {
        if (d[i] == Scalar(0)) d[i] = tiny;
        const Scalar fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const Scalar fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const Scalar temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
      }
    }
    if (d[n - 1] == Scalar(0)) d[n - 1] = tiny;

    for (Index i = 0; i < n; ++i) x[i] = Scalar(1) + Scalar(0.25) * std::sin(Scalar(i * (j + 3) + 1));
    for (int iteration = 0; iteration < 3; ++iteration) {
      for (Index i = 0; i + 1 < n; ++i) {
        if (swapped[i]) std::swap(x[i], x[i + 1]);
        x[i + 1] -= dl[i] * x[i];
      }
      x[n - 1] /= d[n - 1];
      x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
      for (Index i = n - 3; i >= 0; --i) x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
      for (int pass = 0; pass < 2; ++pass)
        for (Index i = 0; i < j; ++i) x -= out.col(i).dot(x) * out.col(i);
      x /= x.norm();
    }
    out.col(j) = x;
  }
  return out;
}

/// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization.
/// Works with any operator providing rows(), cols(), A * x and A^T * y.
/// Wide matrices are handled through their transpose so that the left
/// Krylov space is the larger one.
template <typename Op>
SingularTriplets<typename Op::Scalar> lanczos_top_k(const Op& op, Index k,
                                                    const TopKSvdOptions& options) {
  using Scalar = typename Op::Scalar;
  const bool wide = op.rows() < op.cols();
  const auto apply = [&](const Vector<Scalar>& x) -> Vector<Scalar> {
    if (wide) return op.transpose() * x;
    return op * x;
  };
  const auto apply_adjoint = [&](const Vector<Scalar>& y) -> Vector<Scalar> {
    if (wide) return op * y;
    return op.transpose() * y;
  };
  const Index d = wide ? op.cols() : op.rows();
  const Index m = wide ? op.rows() : op.cols();
  const Index n = m;
  std::mt19937_64 rng(options.seed);

  Matrix<Scalar> U(d, n);
  Matrix<Scalar> V(m, n + 1);
  Vector<Scalar> alphas = Vector<Scalar>::Zero(n);
  Vector<Scalar> betas = Vector<Scalar>::Zero(n);

  {
    Vector<Scalar> v0 = gaussian_vector<Scalar>(m, rng);
    V.col(0) = v0 / v0.norm();
  }
  const Index min_steps = std::min(n, 2 * k + 8);
  const Scalar scale_guard = std::sqrt(std::numeric_limits<Scalar>::epsilon());

  Index steps = 0;
  Matrix<Scalar> P;
  Matrix<Scalar> Q;
  Vector<Scalar> ritz;
  Vector<Scalar> previous;
  Index next_full_check = 0;
  Scalar norm_estimate = 0;

  for (Index j = 0; j < n; ++j) {
    Vector<Scalar> u = apply(V.col(j));
    if (j > 0) u -= betas[j - 1] * U.col(j - 1);
    reorthogonalize(u, U, j);
    Scalar a = u.norm();
    norm_estimate = std::max(norm_estimate, a);
    if (a <= scale_guard * std::max(norm_estimate, Scalar(1e-300))) {
      a = 0;
      u = fresh_direction(U, j, rng);
    } else {
      u /= a;
    }
    U.col(j) = u;
    alphas[j] = a;

    Vector<Scalar> v = apply_adjoint(U.col(j));
    v -= a * V.col(j);
    reorthogonalize(v, V, j + 1);
    Scalar b = v.norm();
    norm_estimate = std::max(norm_estimate, b);
    if (j + 1 < n) {
      if (b <= scale_guard * std::max(norm_estimate, Scalar(1e-300))) {
        b = 0;
        v = fresh_direction(V, j + 1, rng);
      } else {
        v /= b;
      }
      V.col(j + 1) = v;
    }
    betas[j] = b;
    steps = j + 1;

    const bool check = steps >= min_steps && ((steps - min_steps) % 2 == 0 || steps == n);
    if (!check) continue;

    // Ritz values from the tridiagonal B^T B. The leading eigenvectors, needed
    // for the residual |b * p_i(last)| with p_i = B q_i / theta_i, are only
    // formed once the leading Ritz values have settled.
    Vector<Scalar> diag(steps);
    Vector<Scalar> sub(std::max<Index>(steps - 1, 0));
    for (Index i = 0; i < steps; ++i) {
      diag[i] = alphas[i] * alphas[i] + (i > 0 ? betas[i - 1] * betas[i - 1] : Scalar(0));
      if (i + 1 < steps) sub[i] = alphas[i] * betas[i];
    }
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Vector<Scalar> lambdas = tri.eigenvalues().reverse();
    ritz = lambdas.cwiseMax(Scalar(0)).cwiseSqrt();
    const bool final_step = steps == n;
    if (!final_step) {
      const bool settled = previous.size() == k &&
                           (ritz.head(k) - previous).cwiseAbs().maxCoeff() <=
                               Scalar(options.tolerance) * std::max(ritz[0], Scalar(1e-300));
      previous = ritz.head(k);
      if (!settled || steps < next_full_check) continue;
    }
    Q = tridiagonal_eigenvectors<Scalar>(diag, sub, lambdas.head(k));
    if (final_step) break;

    const Scalar threshold = Scalar(options.tolerance) * std::max(ritz[0], Scalar(1e-300));
    bool converged = true;
    for (Index i = 0; i < k && converged; ++i) {
      const Scalar last = ritz[i] > 0 ? alphas[steps - 1] * Q(steps - 1, i) / ritz[i] : Scalar(1);
      converged = std::abs(b * last) <= threshold;
    }
    if (converged) break;
    next_full_check = steps + std::max<Index>(4, steps / 4);
  }

  Matrix<Scalar> B = Matrix<Scalar>::Zero(steps, steps);
  for (Index i = 0; i < steps; ++i) {
    B(i, i) = alphas[i];
    if (i + 1 < steps) B(i, i + 1) = betas[i];
  }
  if (ritz[k - 1] >= Scalar(1e-4) * ritz[0] && ritz[0] > 0) {
    P = B * Q.leftCols(k) * ritz.head(k).cwiseInverse().asDiagonal();
  } else {
    // Small Ritz values make B q / theta inaccurate; take the direct route.
    Eigen::JacobiSVD<Matrix<Scalar>> small(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    P = small.matrixU();
    Q = small.matrixV();
    ritz = small.singularValues();
  }

  SingularTriplets<Scalar> out;
  out.U = U.leftCols(steps) * P.leftCols(k);
  out.V = V.leftCols(steps) * Q.leftCols(k);
  out.sigma = ritz.head(k);
  if (wide) std::swap(out.U, out.V);
  return out;
}

}  // namespace detail

template <typename Derived>
SingularTriplets<typename Derived::Scalar> full_svd(const Eigen::MatrixBase<Derived>& W) {
  using Scalar = typename Derived::Scalar;
  if (W.size() == 0) throw std::invalid_argument("full_svd: empty matrix");
  if (!W.allFinite()) throw std::invalid_argument("full_svd: non-finite entries");
  Eigen::BDCSVD<Matrix<Scalar>> svd(W.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularTriplets<Scalar> t{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  detail::canonicalize_signs(t);
  return t;
}

/// The k leading singular triplets of a dense or sparse matrix.
template <typename Op>
SingularTriplets<typename Op::Scalar> top_k_svd(const Op& A, Index k,
                                                const TopKSvdOptions& options = {}) {
  using Scalar = typename Op::Scalar;
  const Index n = std::min(A.rows(), A.cols());
  if (n < 1) throw std::invalid_argument("top_k_svd: empty matrix");
  if (k < 1 || k > n) throw std::invalid_argument("top_k_svd: k out of range");

  constexpr bool is_dense = std::is_base_of_v<Eigen::MatrixBase<Op>, Op>;
  SingularTriplets<Scalar> t;
  if constexpr (is_dense) {
    const bool dense = options.method == SvdMethod::dense ||
                       (options.method == SvdMethod::automatic && n <= options.dense_cutoff);
    if (dense) {
      t = full_svd(A);
      t.U.conservativeResize(Eigen::NoChange, k);
      t.V.conservativeResize(Eigen::NoChange, k);
      t.sigma.conservativeResize(k);
      return t;
    }
    if (!A.allFinite()) throw std::invalid_argument("top_k_svd: non-finite entries");
  }
  t = detail::lanczos_top_k(A, k, options);
  detail::canonicalize_signs(t);
  return t;
}

}  // namespace kpsupport
