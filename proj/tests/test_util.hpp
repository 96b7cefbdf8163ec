#pragma once

#include "kpsupport/params.hpp"

#include <gtest/gtest.h>

#include <initializer_list>
#include <random>

namespace kpsupport {

inline Vector<double> vec(std::initializer_list<double> values) {
  Vector<double> v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

namespace testing_util {

/// Gaussian entries, with a few exact zeros and repeated magnitudes mixed in
/// so that ties and sparsity get exercised.
inline Vector<double> random_vector(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal(rng);
  if (d > 2 && rng() % 4 == 0) v[static_cast<Index>(rng() % d)] = 0.0;
  if (d > 2 && rng() % 4 == 0) v[static_cast<Index>(rng() % d)] = -v[0];
  return v;
}

inline Matrix<double> random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<double> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// p drawn from a mix of the interior, the l1 end and infinity.
inline double random_p(std::mt19937_64& rng) {
  switch (rng() % 6) {
    case 0: return 1.0;
    case 1: return std::numeric_limits<double>::infinity();
    default: return 1.0 + std::exp(std::uniform_real_distribution<double>(-3.0, 3.5)(rng));
  }
}

template <typename A, typename B>
void expect_near(const A& actual, const B& expected, double tol) {
  ASSERT_EQ(actual.rows(), expected.rows());
  ASSERT_EQ(actual.cols(), expected.cols());
  EXPECT_LE((actual - expected).template lpNorm<Eigen::Infinity>(), tol)
      << "actual:\n" << actual << "\nexpected:\n" << expected;
}

}  // namespace testing_util
}  // namespace kpsupport
