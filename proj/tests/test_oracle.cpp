#include "kpsupport/norms.hpp"
#include "kpsupport/oracle.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace kpsupport {
namespace {

using Vec = Vector<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(GroupSystem, EnumeratesAllSmallSubsets) {
  const oracle::GroupSystem system(5, 3);
  EXPECT_EQ(system.size(), 5u + 10u + 10u);
  EXPECT_EQ(system.size(), oracle::GroupSystem::expected_size(5, 3));
  for (const auto& g : system.groups()) {
    EXPECT_GE(g.size(), 1u);
    EXPECT_LE(g.size(), 3u);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  }
  EXPECT_THROW(oracle::GroupSystem(3, 4), std::invalid_argument);
}

TEST(BruteforceDual, Examples) {
  EXPECT_NEAR(oracle::bruteforce_dual(vec({3, 2, 1}), 2, 2.0), std::sqrt(13.0), 1e-14);
  for (Index k = 1; k <= 4; ++k)
    EXPECT_DOUBLE_EQ(oracle::bruteforce_dual(vec({1, 0, 0, 0}), k, 3.0), 1.0);
  EXPECT_THROW(oracle::bruteforce_dual(Vec::Ones(21), 2, 2.0), std::invalid_argument);
}

TEST(BruteforceDual, EqualsClosedForm) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Index d = 1 + trial % 12;
    const Vec u = testing_util::random_vector(rng, d);
    const double p = testing_util::random_p(rng);
    for (Index k = 1; k <= d; ++k) {
      const double closed = kp_dual_norm(u, SupportParams<double>(k, p));
      EXPECT_NEAR(oracle::bruteforce_dual(u, k, p), closed, 1e-12 * std::max(1.0, closed));
    }
  }
}

TEST(InfconvUpper, UnitVectorAndFullSupport) {
  EXPECT_NEAR(oracle::infconv_upper(vec({1, 0, 0}), 2, 2.0), 1.0, 1e-3);
  const Vec w = vec({0.4, -1.3, 0.7});
  const double l3 = std::pow(w.cwiseAbs().array().pow(3.0).sum(), 1.0 / 3.0);
  const double upper = oracle::infconv_upper(w, 3, 3.0);
  EXPECT_GE(upper, l3 * (1 - 1e-12));
  EXPECT_LE(upper, l3 * (1 + 1e-3));
  EXPECT_THROW(oracle::infconv_upper(Vec::Ones(6), 2, 2.0), std::invalid_argument);
  oracle::InfconvConfig short_run;
  short_run.iterations = 10;
  EXPECT_THROW(oracle::infconv_upper(w, 2, 2.0, short_run), std::invalid_argument);
}

TEST(InfconvUpper, ApproachesSqrt18FromAbove) {
  const double upper = oracle::infconv_upper(vec({3, 2, 1}), 2, 2.0);
  EXPECT_GE(upper, std::sqrt(18.0) * (1 - 1e-12));
  EXPECT_LE(upper, std::sqrt(18.0) * (1 + 1e-3));
}

TEST(CertificateLower, Examples) {
  EXPECT_NEAR(oracle::certificate_lower(vec({1, 0, 0}), 2, 2.0), 1.0, 1e-14);
  EXPECT_NEAR(oracle::certificate_lower(vec({3, 2, 1}), 2, 2.0), std::sqrt(18.0), 1e-13);
  EXPECT_THROW(oracle::certificate_lower(vec({0, 0}), 1, 2.0), std::invalid_argument);
}

TEST(CertificateLower, NeverExceedsUpperBound) {
  std::mt19937_64 rng(32);
  oracle::InfconvConfig config;
  config.iterations = 100000;
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = 2 + trial % 4;
    const Index k = 1 + trial % std::min<Index>(3, d);
    const Vec w = testing_util::random_vector(rng, d);
    if (w.isZero(0)) continue;
    const double p = std::vector<double>{1.5, 2.0, 3.0, 10.0}[trial % 4];
    const double lower = oracle::certificate_lower(w, k, p);
    const double upper = oracle::infconv_upper(w, k, p, config);
    EXPECT_LE(lower, upper + 1e-3 * upper);
  }
}

TEST(DykstraProject, FeasiblePointIsFixed) {
  const Vec w = vec({0.3, -0.2, 0.4});
  testing_util::expect_near(oracle::dykstra_project(w, 1, 1.0), w, 1e-15);
  EXPECT_THROW(oracle::dykstra_project(w, 1, 1.0, 10), std::invalid_argument);
}

TEST(DykstraProject, LandsInTheBall) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 1 + trial % 20;
    const Index k = 1 + static_cast<Index>(rng() % d);
    const Vec x = oracle::dykstra_project(4.0 * testing_util::random_vector(rng, d), k, 0.7);
    EXPECT_LE(kp_norm(x, SupportParams<double>(k, kInf)), 0.7 * (1 + 1e-8));
  }
}

}  // namespace
}  // namespace kpsupport
