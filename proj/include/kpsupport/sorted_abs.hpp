#pragma once

#include "kpsupport/params.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace kpsupport {

/// A vector together with its magnitudes in nonincreasing order.
///
/// `z[i] = |original[perm[i]]|` and `original[j] = signs[j] * |original[j]|`.
/// Equal magnitudes keep ascending original index, so the first k entries of
/// `perm` are a deterministic choice of the k largest components.
template <typename Scalar>
struct SortedAbsView {
  Vector<Scalar> original;
  Vector<Scalar> z;
  std::vector<Index> perm;
  Vector<Scalar> signs;

  Index size() const { return z.size(); }

  /// Inverse of the reordering: places `sorted_values[i]` at `perm[i]` and
  /// applies the original signs.
  Vector<Scalar> unsort(const Vector<Scalar>& sorted_values) const {
    Vector<Scalar> out(size());
    for (Index i = 0; i < size(); ++i)
      out[perm[i]] = signs[perm[i]] * sorted_values[i];
    return out;
  }
};

template <typename Derived>
SortedAbsView<typename Derived::Scalar> sort_abs(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  const Index d = w.size();
  if (d < 1) throw std::invalid_argument("sort_abs: empty vector");

  SortedAbsView<Scalar> view;
  view.original = w;
  view.perm.resize(static_cast<std::size_t>(d));
  std::iota(view.perm.begin(), view.perm.end(), Index{0});
  const auto abs_w = view.original.cwiseAbs().eval();
  std::stable_sort(view.perm.begin(), view.perm.end(),
                   [&](Index a, Index b) { return abs_w[a] > abs_w[b]; });

  view.z.resize(d);
  view.signs.resize(d);
  for (Index i = 0; i < d; ++i) {
    view.z[i] = abs_w[view.perm[i]];
    view.signs[i] = view.original[i] < Scalar(0) ? Scalar(-1) : Scalar(1);
  }
  return view;
}

}  // namespace kpsupport
