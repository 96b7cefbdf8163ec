#pragma once

#include "kpsupport/params.hpp"
#include "kpsupport/svd.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace kpsupport::completion {

using Mat = Matrix<double>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A matrix of which only the entries flagged in `mask` are known. Unobserved
/// entries of `values` are stored as zero.
class MaskedMatrix {
 public:
  MaskedMatrix() = default;
  MaskedMatrix(const Mat& values, const Mask& mask);

  const Mat& values() const { return values_; }
  const Mask& mask() const { return mask_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  Index observed_count() const { return static_cast<Index>(mask_.count()); }

 private:
  Mat values_;
  Mask mask_;
};

struct ObservedEntry {
  Index row;
  Index col;
  double value;
};

/// f(W) = ||Omega(X - W)||_F^2 with gradient 2 Omega(W - X). Evaluation cost
/// is linear in the number of observed entries.
class MaskedSquaredLoss {
 public:
  explicit MaskedSquaredLoss(const MaskedMatrix& data);

  double value(const Mat& W) const;
  Mat gradient(const Mat& W) const;

  const std::vector<ObservedEntry>& entries() const { return entries_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

 private:
  void check_shape(const Mat& W) const;

  std::vector<ObservedEntry> entries_;
  Index rows_ = 0;
  Index cols_ = 0;
};

struct LossEvaluation {
  double value;
  Mat gradient;
};

LossEvaluation masked_loss(const Mat& W, const MaskedMatrix& data);

/// Spectral (k,p)-support ball whose oracle only reads a fixed sparsity
/// pattern of its argument. Exact for gradients of MaskedSquaredLoss, which
/// vanish off the observed entries.
class PatternSpectralBall {
 public:
  PatternSpectralBall(const MaskedSquaredLoss& loss, const SupportParams<double>& params,
                      TopKSvdOptions svd_options = {});

  Mat lmo(const Mat& G) const;
  double norm(const Mat& X) const;
  double radius() const { return params_.alpha(); }
  const SupportParams<double>& params() const { return params_; }

 private:
  SupportParams<double> params_;
  TopKSvdOptions svd_options_;
  Eigen::SparseMatrix<double> pattern_;
};

}  // namespace kpsupport::completion
