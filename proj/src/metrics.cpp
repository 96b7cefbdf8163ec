#include "kpsupport/completion/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace kpsupport::completion {
namespace {

void check_shapes(Index rows, Index cols, const Mat& pred) {
  if (pred.rows() != rows || pred.cols() != cols)
    throw std::invalid_argument("metric: prediction has the wrong shape");
}

}  // namespace

RatingRange::RatingRange(double lo, double hi) : min(lo), max(hi) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("RatingRange: need finite min < max");
}

double nmae(const MaskedMatrix& truth, const Mat& pred, const RatingRange& range) {
  check_shapes(truth.rows(), truth.cols(), pred);
  const Index count = truth.observed_count();
  if (count == 0) throw std::invalid_argument("nmae: empty test set");
  const double total = truth.mask().select((truth.values() - pred).cwiseAbs(), 0.0).sum();
  return total / (double(count) * range.width());
}

double relative_error(const Mat& truth, const Mat& pred) {
  check_shapes(truth.rows(), truth.cols(), pred);
  const double denominator = truth.squaredNorm();
  if (denominator == 0) throw std::invalid_argument("relative_error: truth is zero");
  return (truth - pred).squaredNorm() / denominator;
}

double relative_error(const MaskedMatrix& truth, const Mat& pred) {
  check_shapes(truth.rows(), truth.cols(), pred);
  if (truth.observed_count() == 0) throw std::invalid_argument("relative_error: empty test set");
  const double denominator = truth.values().squaredNorm();
  if (denominator == 0) throw std::invalid_argument("relative_error: truth is zero");
  return truth.mask().select(truth.values() - pred, 0.0).matrix().squaredNorm() / denominator;
}

Mat threshold_predictions(const Mat& W, const RatingRange& range) {
  return W.cwiseMax(range.min).cwiseMin(range.max);
}

}  // namespace kpsupport::completion
