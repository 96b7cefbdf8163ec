#pragma once

#include "kpsupport/completion/masked.hpp"

namespace kpsupport::completion {

/// Closed rating interval [min, max] with min < max.
struct RatingRange {
  double min;
  double max;

  RatingRange(double lo, double hi);
  double width() const { return max - min; }
};

/// sum_{test} |truth - pred| / (#test * (max - min)).
double nmae(const MaskedMatrix& truth, const Mat& pred, const RatingRange& range);

/// ||truth - pred||_F^2 / ||truth||_F^2.
double relative_error(const Mat& truth, const Mat& pred);

/// The same ratio restricted to the entries of `truth.mask()`.
double relative_error(const MaskedMatrix& truth, const Mat& pred);

/// Entrywise clamp into the rating range.
Mat threshold_predictions(const Mat& W, const RatingRange& range);

}  // namespace kpsupport::completion
