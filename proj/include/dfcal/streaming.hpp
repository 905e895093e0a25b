#pragma once

#include <cstddef>
#include <vector>

#include "dfcal/binning.hpp"
#include "dfcal/tripod.hpp"

namespace dfcal {

/// Running label statistics of one bin in the streaming setting.
///
/// `cum_var_raw` accumulates (Y_i - Ybar_{i-1})^2 where Ybar_{i-1} is the mean
/// of the labels seen before Y_i (1/2 before the first label). The floor at 1
/// is applied when the variance process is queried, never stored, so replaying
/// a stream reproduces the state exactly.
struct StreamBinState {
  std::size_t count = 0;
  std::size_t sum = 0;
  double mean = 0.0;
  double cum_var_raw = 0.0;

  /// Mean used to center the next observation.
  double predictable_mean() const { return count == 0 ? 0.5 : mean; }

  /// max(1, cum_var_raw).
  double variance_process() const;

  [[nodiscard]] StreamBinState update(int label) const;

  bool operator==(const StreamBinState&) const = default;
};

/// Riemann zeta for real s > 1 (Euler-Maclaurin corrected partial sum,
/// absolute error well below 1e-12).
double riemann_zeta(double s);

/// Parameters of the polynomial stitching boundary
///
///   S(v) = sqrt(k1^2 v l(v) + k2^2 c^2 l(v)^2) + k2 c l(v)
///   l(v) = s ln(1 + log_eta(v/m)) + ln zeta(s) + ln(1/alpha_per_bin)
///
/// with k1 = (eta^{1/4} + eta^{-1/4})/sqrt 2 and k2 = (sqrt eta + 1)/sqrt 2.
struct StitchingParams {
  double eta = 0.0;
  double s = 0.0;
  double m = 0.0;
  double c = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double zeta_s = 0.0;
  double alpha_per_bin = 0.0;

  /// eta = e, s = 1.4, m = 1, c = 1 and the crossing probability split as
  /// alpha / (2B): one factor 2 for the two-sided bound, one B for the union
  /// over bins.
  static StitchingParams for_bins(std::size_t bins, double alpha);

  double log_term(double v) const;
};

/// S(max(v, m)). Throws OutOfDomain for v < 0.
double stitched_boundary(double v, const StitchingParams& params);

/// Closed-form time-uniform radius
///
///   (7 sqrt(V ln(1 + ln V)) + 5.3 ln(6.3 B / alpha)) / N,   V = max(1, cum_var_raw)
///
/// valid simultaneously for all bins and all stream lengths.
double closed_form_radius(const StreamBinState& state, std::size_t bins, double alpha);

/// S(V) / N with the stitching parameters of `StitchingParams::for_bins`.
/// Never larger than `closed_form_radius` for the same inputs.
double stitched_radius(const StreamBinState& state, std::size_t bins, double alpha);

enum class StreamMode { ClosedForm, Stitched };

StreamMode stream_mode_from_string(const std::string& name);

Interval stream_interval(const StreamBinState& state, std::size_t bins, double alpha,
                         StreamMode mode = StreamMode::ClosedForm);

/// Binned calibrator fed one labelled score at a time. Each bin has a single
/// writer; queries on a calibrator that is not being updated are thread safe.
class StreamCalibrator {
 public:
  StreamCalibrator(BinningScheme scheme, double alpha,
                   StreamMode mode = StreamMode::ClosedForm);

  /// Returns the zero-based bin the observation fell into.
  std::size_t observe(double score, int label);

  const BinningScheme& scheme() const { return scheme_; }
  const StreamBinState& state(std::size_t bin) const { return states_.at(bin); }
  std::size_t observations() const { return observations_; }

  double radius(std::size_t bin) const;
  Interval interval(std::size_t bin) const;

 private:
  BinningScheme scheme_;
  double alpha_;
  StreamMode mode_;
  StitchingParams params_;
  std::vector<StreamBinState> states_;
  std::size_t observations_ = 0;
};

}  // namespace dfcal
