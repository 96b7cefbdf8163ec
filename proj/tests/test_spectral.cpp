#include "kpsupport/spectral.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCore>
#include <gtest/gtest.h>

namespace kpsupport {
namespace {

using Mat = Matrix<double>;
using Vec = Vector<double>;
using Params = SupportParams<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

Mat orthogonal(std::mt19937_64& rng, Index n) {
  Eigen::HouseholderQR<Mat> qr(testing_util::random_matrix(rng, n, n));
  return qr.householderQ() * Mat::Identity(n, n);
}

void expect_valid_triplets(const SingularTriplets<double>& t, const Mat& W, double tol) {
  const Index r = t.sigma.size();
  EXPECT_LE((t.U.transpose() * t.U - Mat::Identity(r, r)).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE((t.V.transpose() * t.V - Mat::Identity(r, r)).lpNorm<Eigen::Infinity>(), 1e-10);
  for (Index i = 0; i < r; ++i) {
    EXPECT_GE(t.sigma[i], 0.0);
    if (i > 0) {
      EXPECT_LE(t.sigma[i], t.sigma[i - 1]);
    }
  }
  if (r == std::min(W.rows(), W.cols())) {
    EXPECT_LE((t.reconstruct() - W).norm(), tol * std::max(W.norm(), 1e-300));
  }
}

TEST(FullSvd, Diagonal) {
  const Mat W = vec({3, 2, 1}).asDiagonal();
  const auto t = full_svd(W);
  testing_util::expect_near(t.sigma, vec({3, 2, 1}), 1e-15);
  expect_valid_triplets(t, W, 1e-14);
  // Sign convention: first non-negligible entry of each u_j is positive.
  for (Index j = 0; j < 3; ++j) EXPECT_GT(t.U(j, j), 0.0);
}

TEST(FullSvd, ZeroMatrix) {
  const auto t = full_svd(Mat::Zero(3, 4));
  EXPECT_EQ(t.sigma, Vec::Zero(3));
}

TEST(FullSvd, RandomMatchesGramEigenvalues) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat W = testing_util::random_matrix(rng, 5, 4);
    const auto t = full_svd(W);
    expect_valid_triplets(t, W, 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat> gram(W.transpose() * W);
    Vec eig = gram.eigenvalues().reverse();
    testing_util::expect_near(t.sigma.array().square().matrix(), eig, 1e-10 * eig[0]);
  }
}

TEST(FullSvd, RejectsNonFinite) {
  Mat W = Mat::Ones(2, 2);
  W(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(full_svd(W), std::invalid_argument);
  EXPECT_THROW(top_k_svd(W, 1, {.method = SvdMethod::lanczos}), std::invalid_argument);
}

TEST(TopKSvd, Examples) {
  const Mat D = vec({3, 2, 1}).asDiagonal();
  for (auto method : {SvdMethod::dense, SvdMethod::lanczos}) {
    const auto t = top_k_svd(D, 2, {.method = method});
    testing_util::expect_near(t.sigma, vec({3, 2}), 1e-13);

    const Vec u = vec({1, 2, 2});
    const Vec v = vec({3, 0, 4, 0});
    const auto r1 = top_k_svd(Mat(u * v.transpose()), 1, {.method = method});
    EXPECT_NEAR(r1.sigma[0], 15.0, 1e-13);
  }
  EXPECT_THROW(top_k_svd(D, 4), std::invalid_argument);
  EXPECT_THROW(top_k_svd(D, 0), std::invalid_argument);
}

TEST(TopKSvd, LanczosAgreesWithFullSvd) {
  std::mt19937_64 rng(42);
  const std::vector<std::pair<Index, Index>> shapes = {{5, 4}, {30, 30}, {60, 40}, {40, 90}, {120, 100}};
  for (auto [rows, cols] : shapes) {
    const Mat W = testing_util::random_matrix(rng, rows, cols);
    const auto full = full_svd(W);
    for (Index k : {Index{1}, Index{3}, std::min<Index>(rows, cols)}) {
      const auto t = top_k_svd(W, k, {.method = SvdMethod::lanczos});
      expect_valid_triplets(t, W, 1e-10);
      for (Index i = 0; i < k; ++i)
        EXPECT_NEAR(t.sigma[i], full.sigma[i], 1e-8 * full.sigma[i]) << rows << "x" << cols;
      // Leading triplets satisfy W v = sigma u.
      EXPECT_LE((W * t.V - t.U * t.sigma.asDiagonal()).norm(), 1e-9 * full.sigma[0]);
    }
  }
}

TEST(TopKSvd, RankDeficientAndSparse) {
  std::mt19937_64 rng(43);
  const Mat low = testing_util::random_matrix(rng, 50, 2) * testing_util::random_matrix(rng, 2, 40);
  const auto t = top_k_svd(low, 4, {.method = SvdMethod::lanczos});
  expect_valid_triplets(t, low, 1e-10);
  const auto full = full_svd(low);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(t.sigma[i], full.sigma[i], 1e-8 * full.sigma[0]);

  const auto zero = top_k_svd(Mat::Zero(20, 30), 2, {.method = SvdMethod::lanczos});
  EXPECT_EQ(zero.sigma, Vec::Zero(2));

  Mat dense = testing_util::random_matrix(rng, 80, 70);
  for (Index j = 0; j < dense.cols(); ++j)
    for (Index i = 0; i < dense.rows(); ++i)
      if ((i * 7 + j * 3) % 5 != 0) dense(i, j) = 0.0;
  const Eigen::SparseMatrix<double> sparse = dense.sparseView();
  const auto ts = top_k_svd(sparse, 3);
  const auto fd = full_svd(dense);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(ts.sigma[i], fd.sigma[i], 1e-8 * fd.sigma[i]);
}

TEST(SpectralNorms, Examples) {
  const Mat D = vec({3, 2, 1}).asDiagonal();
  EXPECT_NEAR(spectral_kp_norm(D, Params(2, 2.0)), std::sqrt(18.0), 1e-13);
  EXPECT_NEAR(spectral_kp_dual_norm(D, Params(2, kInf)), 5.0, 1e-13);

  const Vec u = vec({0.6, 0.8, 0});
  const Vec v = vec({0, 1, 0, 0});
  const Mat R = u * v.transpose();
  for (Index k = 1; k <= 3; ++k)
    for (double p : {1.0, 1.5, 2.0, 7.0, kInf})
      EXPECT_NEAR(spectral_kp_norm(R, Params(k, p)), 1.0, 1e-13);
}

TEST(SpectralNorms, OrthogonalInvariance) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 3 + trial % 6;
    const Index m = 2 + trial % 7;
    const Mat W = testing_util::random_matrix(rng, d, m);
    const Mat rotated = orthogonal(rng, d) * W * orthogonal(rng, m).transpose();
    const Params params(1 + trial % std::min(d, m), testing_util::random_p(rng));
    const double n = spectral_kp_norm(W, params);
    EXPECT_NEAR(spectral_kp_norm(rotated, params), n, 1e-8 * n);
  }
}

TEST(SpectralNorms, DiagonalConsistency) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    Vec diag = testing_util::random_vector(rng, 6).cwiseAbs();
    std::sort(diag.data(), diag.data() + diag.size(), std::greater<>());
    const Mat D = diag.asDiagonal();
    const Params params(1 + trial % 6, testing_util::random_p(rng));
    EXPECT_NEAR(spectral_kp_norm(D, params), kp_norm(diag, params), 1e-12 * diag.sum());
  }
}

TEST(SpectralNorms, DualityInequality) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 60; ++trial) {
    const Mat W = testing_util::random_matrix(rng, 7, 5);
    const Mat Z = testing_util::random_matrix(rng, 7, 5);
    const Params params(1 + trial % 5, testing_util::random_p(rng));
    const double bound = spectral_kp_norm(W, params) * spectral_kp_dual_norm(Z, params);
    EXPECT_LE(std::abs(W.cwiseProduct(Z).sum()), bound * (1 + 1e-10));
  }
}

// A random matrix of rank <= k with unit Schatten-p norm.
Mat random_atom(std::mt19937_64& rng, Index d, Index m, Index k, double p) {
  const Index rank = 1 + static_cast<Index>(rng() % k);
  Vec s = testing_util::random_vector(rng, rank).cwiseAbs();
  s /= std::isinf(p) ? s.maxCoeff() : std::pow(s.array().pow(p).sum(), 1.0 / p);
  Eigen::HouseholderQR<Mat> qu(testing_util::random_matrix(rng, d, rank));
  Eigen::HouseholderQR<Mat> qv(testing_util::random_matrix(rng, m, rank));
  const Mat U = qu.householderQ() * Mat::Identity(d, rank);
  const Mat V = qv.householderQ() * Mat::Identity(m, rank);
  return U * s.asDiagonal() * V.transpose();
}

TEST(SpectralNorms, UnitBallContainsLowRankAtomsAndTheirHull) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = 4 + trial % 4;
    const Index m = 3 + trial % 5;
    const Index k = 1 + trial % std::min(d, m);
    const double p = std::vector<double>{1.0, 1.5, 2.0, 4.0, kInf}[trial % 5];
    const Params params(k, p);
    Mat hull = Mat::Zero(d, m);
    double remaining = 1.0;
    for (int j = 0; j < 5; ++j) {
      const Mat atom = random_atom(rng, d, m, k, p);
      EXPECT_LE(spectral_kp_norm(atom, params), 1 + 1e-8);
      const double weight = j == 4 ? remaining : remaining * 0.5;
      hull += weight * atom;
      remaining -= weight;
    }
    EXPECT_LE(spectral_kp_norm(hull, params), 1 + 1e-8);
  }
}

TEST(LmoSpectral, Examples) {
  Mat G = Mat::Zero(3, 3);
  G.diagonal() = vec({1, -2, 0});
  const Mat S = lmo_spectral(G, Params(1, 2.0, 1.0));
  EXPECT_NEAR(S.cwiseProduct(G).sum(), -2.0, 1e-13);
  EXPECT_NEAR(spectral_kp_norm(S, Params(1, 2.0)), 1.0, 1e-13);
  EXPECT_LE(full_svd(S).sigma[1], 1e-12);

  const Vec u = vec({0.6, 0, 0.8});
  const Vec v = vec({0, 1, 0, 0});
  const Mat R = u * v.transpose();
  for (double p : {1.0, 2.0, 5.0, kInf})
    testing_util::expect_near(lmo_spectral(R, Params(1, p, 2.5)), Mat(-2.5 * R), 1e-13);

  EXPECT_EQ(lmo_spectral(Mat::Zero(3, 2), Params(1, 2.0)), Mat::Zero(3, 2));
}

TEST(LmoSpectral, KyFanIdentityAndOptimality) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 4 + trial % 5;
    const Index m = 3 + trial % 6;
    const Mat G = testing_util::random_matrix(rng, d, m);
    const auto full = full_svd(G);

    const Mat S_inf = lmo_spectral(G, Params(2, kInf, 1.0));
    EXPECT_NEAR(S_inf.cwiseProduct(G).sum(), -(full.sigma[0] + full.sigma[1]), 1e-10);

    const Index k = 1 + trial % std::min(d, m);
    const double p = testing_util::random_p(rng);
    const Params params(k, p, 1.7);
    const Mat S = lmo_spectral(G, params);
    const double value = S.cwiseProduct(G).sum();
    EXPECT_NEAR(value, -1.7 * kp_dual_norm(full.sigma, params), 1e-10 * full.sigma[0]);
    EXPECT_NEAR(spectral_kp_norm(S, params), 1.7, 1e-9);
    for (int i = 0; i < 300; ++i) {
      Mat candidate = Mat::Zero(d, m);
      double remaining = 1.0;
      for (int j = 0; j < 3; ++j) {
        const double weight = j == 2 ? remaining : remaining * std::uniform_real_distribution<double>(0, 1)(rng);
        candidate += weight * random_atom(rng, d, m, k, p);
        remaining -= weight;
      }
      candidate *= 1.7;
      ASSERT_LE(value, candidate.cwiseProduct(G).sum() + 1e-10);
    }
  }
}

TEST(ProjectSpectralKinf, Examples) {
  const Mat inside = vec({0.5, 0.25}).asDiagonal();
  testing_util::expect_near(project_spectral_kinf(inside, 1, 1.0), inside, 1e-14);

  const Mat D = vec({2, 0.5}).asDiagonal();
  testing_util::expect_near(project_spectral_kinf(D, 1, 1.0), Mat(vec({1, 0}).asDiagonal()), 1e-14);

  const Vec u = vec({0.6, 0.8});
  const Vec v = vec({0, 0, 1});
  const Mat R = u * v.transpose();
  testing_util::expect_near(project_spectral_kinf(Mat(2 * 1.5 * R), 1, 1.5), Mat(1.5 * R), 1e-14);
  EXPECT_THROW(project_spectral_kinf(D, 3, 1.0), std::invalid_argument);
}

TEST(ProjectSpectralKinf, FeasibleAndVariational) {
  std::mt19937_64 rng(49);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat W = 2.0 * testing_util::random_matrix(rng, 5, 4);
    const Index k = 1 + trial % 4;
    const Mat X = project_spectral_kinf(W, k, 1.0);
    EXPECT_LE(spectral_kp_norm(X, Params(k, kInf)), 1 + 1e-10);
    for (int i = 0; i < 200; ++i) {
      const Mat Z = project_spectral_kinf(Mat(2.0 * testing_util::random_matrix(rng, 5, 4)), k, 1.0);
      ASSERT_LE((W - X).cwiseProduct(Z - X).sum(), 1e-8);
    }
  }
}

}  // namespace
}  // namespace kpsupport
