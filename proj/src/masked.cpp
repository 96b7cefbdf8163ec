#include "kpsupport/completion/masked.hpp"

#include "kpsupport/spectral.hpp"

#include <stdexcept>

namespace kpsupport::completion {

MaskedMatrix::MaskedMatrix(const Mat& values, const Mask& mask)
    : values_(mask.select(values, 0.0)), mask_(mask) {
  if (values.rows() != mask.rows() || values.cols() != mask.cols())
    throw std::invalid_argument("MaskedMatrix: values and mask differ in shape");
}

MaskedSquaredLoss::MaskedSquaredLoss(const MaskedMatrix& data)
    : rows_(data.rows()), cols_(data.cols()) {
  entries_.reserve(static_cast<std::size_t>(data.observed_count()));
  // Column-major order, matching the sparse pattern built from these entries.
  for (Index j = 0; j < cols_; ++j)
    for (Index i = 0; i < rows_; ++i)
      if (data.mask()(i, j)) entries_.push_back({i, j, data.values()(i, j)});
}

void MaskedSquaredLoss::check_shape(const Mat& W) const {
  if (W.rows() != rows_ || W.cols() != cols_)
    throw std::invalid_argument("masked loss: shape mismatch");
}

double MaskedSquaredLoss::value(const Mat& W) const {
  check_shape(W);
  double total = 0;
  for (const auto& e : entries_) {
    const double r = W(e.row, e.col) - e.value;
    total += r * r;
  }
  return total;
}

Mat MaskedSquaredLoss::gradient(const Mat& W) const {
  check_shape(W);
  Mat G = Mat::Zero(rows_, cols_);
  for (const auto& e : entries_) G(e.row, e.col) = 2.0 * (W(e.row, e.col) - e.value);
  return G;
}

LossEvaluation masked_loss(const Mat& W, const MaskedMatrix& data) {
  const MaskedSquaredLoss loss(data);
  return {loss.value(W), loss.gradient(W)};
}

PatternSpectralBall::PatternSpectralBall(const MaskedSquaredLoss& loss,
                                         const SupportParams<double>& params,
                                         TopKSvdOptions svd_options)
    : params_(params), svd_options_(svd_options), pattern_(loss.rows(), loss.cols()) {
  params_.check_dimension(std::min(loss.rows(), loss.cols()));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(loss.entries().size());
  for (const auto& e : loss.entries()) triplets.emplace_back(e.row, e.col, 1.0);
  pattern_.setFromTriplets(triplets.begin(), triplets.end());
  pattern_.makeCompressed();
}

Mat PatternSpectralBall::lmo(const Mat& G) const {
  if (G.rows() != pattern_.rows() || G.cols() != pattern_.cols())
    throw std::invalid_argument("PatternSpectralBall: shape mismatch");
  Eigen::SparseMatrix<double> sparse = pattern_;
  for (Index j = 0; j < sparse.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sparse, j); it; ++it)
      it.valueRef() = G(it.row(), it.col());
  return lmo_spectral(sparse, params_, svd_options_);
}

double PatternSpectralBall::norm(const Mat& X) const {
  if (X.isZero(0.0)) return 0.0;
  return spectral_kp_norm(X, params_);
}

}  // namespace kpsupport::completion
