#pragma once

#include <span>
#include <string>

namespace dfcal {

/// Closed interval inside [0, 1].
struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double x) const { return lower <= x && x <= upper; }
  bool valid() const;

  bool operator==(const Interval&) const = default;
};

/// [center - radius, center + radius] intersected with [0, 1].
Interval clipped_interval(double center, double radius);

/// A subset of {0, 1}. The empty set is a legal value.
struct PredictionSet {
  bool contains_zero = false;
  bool contains_one = false;

  bool empty() const { return !contains_zero && !contains_one; }
  /// 1 for {0, 1}, otherwise 0.
  int diameter() const { return contains_zero && contains_one ? 1 : 0; }
  /// "{}", "{0}", "{1}" or "{0,1}".
  std::string to_string() const;

  bool operator==(const PredictionSet&) const = default;
};

/// An (eps, alpha)-calibrated prediction yields the interval
/// [prediction - eps, prediction + eps] (clipped to [0, 1]).
Interval calibrator_to_ci(double prediction, double epsilon);

struct MidpointPrediction {
  double midpoint = 0.0;
  double half_width = 0.0;
};

/// The midpoint of a confidence interval is a recalibrated prediction whose
/// calibration radius is the half-width. Across a family of intervals the
/// radius to report is the largest half-width (see `calibration_radius`).
MidpointPrediction ci_to_calibrator(const Interval& interval);

/// Largest half-width over a family of intervals.
double calibration_radius(std::span<const Interval> intervals);

/// Intersection of the interval with {0, 1}.
PredictionSet ci_to_prediction_set(const Interval& interval);

}  // namespace dfcal
