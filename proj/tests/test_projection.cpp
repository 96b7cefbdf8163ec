#include "kpsupport/norms.hpp"
#include "kpsupport/oracle.hpp"
#include "kpsupport/projection.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace kpsupport {
namespace {

using Vec = Vector<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(ProjectUnitKinf, FeasiblePointIsFixed) {
  const Vec w = vec({0.5, -0.25, 0.1});
  const auto r = project_unit_kinf(w, 1);
  EXPECT_EQ(r.x, w);
  EXPECT_EQ(r.beta, 0.0);
  EXPECT_FALSE(r.active_l1);
}

TEST(ProjectUnitKinf, Examples) {
  const auto sym = project_unit_kinf(vec({2, 2}), 1);
  testing_util::expect_near(sym.x, vec({0.5, 0.5}), 1e-15);
  EXPECT_NEAR(sym.beta, 1.5, 1e-15);
  EXPECT_TRUE(sym.active_l1);

  // Any beta in [0.5, 1] satisfies the optimality conditions here; the left
  // end is reported.
  const auto a = project_unit_kinf(vec({2, 0.5}), 1);
  testing_util::expect_near(a.x, vec({1, 0}), 1e-15);
  EXPECT_NEAR(a.beta, 0.5, 1e-15);
  testing_util::expect_near(oracle::dykstra_project(vec({2, 0.5}), 1, 1.0), vec({1, 0}), 1e-8);

  const auto b = project_unit_kinf(vec({3, 0.2}), 1);
  testing_util::expect_near(b.x, vec({1, 0}), 1e-15);
  testing_util::expect_near(oracle::dykstra_project(vec({3, 0.2}), 1, 1.0), vec({1, 0}), 1e-8);
}

TEST(ProjectUnitKinf, SmallEntriesAreZeroedNotFlipped) {
  const auto r = project_unit_kinf(vec({5, 4, 0.1, -0.2}), 1);
  EXPECT_EQ(r.x[2], 0.0);
  EXPECT_EQ(r.x[3], 0.0);
  EXPECT_NEAR(r.x.lpNorm<1>(), 1.0, 1e-12);
}

TEST(ProjectUnitKinf, BoxOnlyWhenClampedPointIsFeasible) {
  // ||w||_1 = 3 > k but clamping alone already gives l1 mass 1 <= 2.
  const auto r = project_unit_kinf(vec({3, 0}), 2);
  EXPECT_EQ(r.x, vec({1, 0}));
  EXPECT_FALSE(r.active_l1);
  EXPECT_EQ(r.beta, 0.0);
}

TEST(ProjectUnitKinf, Errors) {
  EXPECT_THROW(project_unit_kinf(vec({1, 2}), 3), std::invalid_argument);
  EXPECT_THROW(project_unit_kinf(vec({1, 2}), 0), std::invalid_argument);
  EXPECT_THROW(project_kinf(vec({1, 2}), 1, 0.0), std::invalid_argument);
}

TEST(ProjectKinf, Rescaling) {
  const Vec w = vec({2, 0.5, -1.5});
  const auto unit = project_unit_kinf(w, 2);
  const auto same = project_kinf(w, 2, 1.0);
  EXPECT_EQ(unit.x, same.x);
  testing_util::expect_near(project_kinf(vec({4, 4}), 1, 2.0).x, vec({1, 1}), 1e-15);
  EXPECT_EQ(project_kinf(vec({0, 0, 0}), 2, 3.0).x, vec({0, 0, 0}));
}

TEST(ProjectKinf, Properties) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + trial % 20;
    const Index k = 1 + static_cast<Index>(rng() % d);
    const double alpha = 0.2 + 2 * unif(rng);
    const Vec w = 2.0 * testing_util::random_vector(rng, d);
    const auto r = project_kinf(w, k, alpha);

    // Feasibility and multiplier bookkeeping.
    EXPECT_LE(r.x.lpNorm<Eigen::Infinity>(), alpha);
    EXPECT_LE(r.x.lpNorm<1>(), k * alpha + 1e-10);
    EXPECT_EQ(r.beta == 0.0, !r.active_l1);
    if (r.beta > 0) {
      EXPECT_NEAR(r.x.lpNorm<1>(), k * alpha, 1e-10);
    }
    EXPECT_LE(kp_norm(r.x, SupportParams<double>(k, kInf)), alpha * (1 + 1e-12));

    // Idempotence.
    testing_util::expect_near(project_kinf(r.x, k, alpha).x, r.x, 1e-12);

    // Oracle agreement.
    testing_util::expect_near(r.x, oracle::dykstra_project(w, k, alpha), 1e-6);

    // Nonexpansiveness.
    const Vec w2 = w + 0.3 * testing_util::random_vector(rng, d);
    EXPECT_LE((project_kinf(w2, k, alpha).x - r.x).norm(), (w2 - w).norm() + 1e-12);
  }
}

TEST(ProjectKinf, VariationalInequality) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + trial % 10;
    const Index k = 1 + static_cast<Index>(rng() % d);
    const Vec w = 3.0 * testing_util::random_vector(rng, d);
    const Vec x = project_unit_kinf(w, k).x;
    for (int i = 0; i < 2000; ++i) {
      const Vec z = project_unit_kinf(3.0 * testing_util::random_vector(rng, d), k).x;
      ASSERT_LE((w - x).dot(z - x), 1e-8);
    }
  }
}

TEST(ProjectKinf, MultiplierMapIsMonotone) {
  // sum_i clamp(|w_i| - beta, 0, 1) is nonincreasing in beta.
  std::mt19937_64 rng(23);
  const Vec a = (3.0 * testing_util::random_vector(rng, 15)).cwiseAbs();
  double previous = std::numeric_limits<double>::infinity();
  for (double beta = 0; beta < 4; beta += 0.01) {
    const double value = (a.array() - beta).cwiseMax(0.0).cwiseMin(1.0).sum();
    EXPECT_LE(value, previous);
    previous = value;
  }
}

}  // namespace
}  // namespace kpsupport
