#include "dfcal/tripod.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfcal/errors.hpp"

namespace dfcal {

namespace {

void require_valid(const Interval& interval) {
  if (!interval.valid()) {
    std::ostringstream msg;
    msg << "invalid interval [" << interval.lower << ", " << interval.upper << "]";
    fail(ErrorKind::InvalidInput, msg.str());
  }
}

}  // namespace

bool Interval::valid() const {
  return std::isfinite(lower) && std::isfinite(upper) && lower <= upper &&
         lower >= 0.0 && upper <= 1.0;
}

Interval clipped_interval(double center, double radius) {
  return {std::clamp(center - radius, 0.0, 1.0), std::clamp(center + radius, 0.0, 1.0)};
}

std::string PredictionSet::to_string() const {
  if (contains_zero && contains_one) return "{0,1}";
  if (contains_zero) return "{0}";
  if (contains_one) return "{1}";
  return "{}";
}

Interval calibrator_to_ci(double prediction, double epsilon) {
  if (!(prediction >= 0.0 && prediction <= 1.0)) {
    fail(ErrorKind::OutOfDomain, "prediction must lie in [0, 1]");
  }
  if (!(epsilon >= 0.0)) fail(ErrorKind::InvalidParameter, "epsilon must be nonnegative");
  return clipped_interval(prediction, epsilon);
}

MidpointPrediction ci_to_calibrator(const Interval& interval) {
  require_valid(interval);
  return {interval.midpoint(), 0.5 * interval.width()};
}

double calibration_radius(std::span<const Interval> intervals) {
  double radius = 0.0;
  for (const auto& interval : intervals) {
    radius = std::max(radius, ci_to_calibrator(interval).half_width);
  }
  return radius;
}

PredictionSet ci_to_prediction_set(const Interval& interval) {
  require_valid(interval);
  return {interval.contains(0.0), interval.contains(1.0)};
}

}  // namespace dfcal
