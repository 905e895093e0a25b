#include "dfcal/streaming.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dfcal/batch.hpp"
#include "dfcal/errors.hpp"

namespace dfcal {

double StreamBinState::variance_process() const { return std::max(1.0, cum_var_raw); }

StreamBinState StreamBinState::update(int label) const {
  if (label != 0 && label != 1) fail(ErrorKind::InvalidInput, "label must be 0 or 1");
  StreamBinState next = *this;
  const double centered = label - predictable_mean();
  next.cum_var_raw += centered * centered;
  next.count += 1;
  next.sum += static_cast<std::size_t>(label);
  next.mean = static_cast<double>(next.sum) / static_cast<double>(next.count);
  return next;
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) fail(ErrorKind::InvalidParameter, "zeta is evaluated only for s > 1");
  // B_{2k} / (2k)! for k = 1..7.
  constexpr std::array<double, 7> kBernoulliOverFactorial = {
      1.0 / 12.0,          -1.0 / 720.0,          1.0 / 30240.0,
      -1.0 / 1209600.0,    1.0 / 47900160.0,      -691.0 / 1307674368000.0,
      1.0 / 74724249600.0};
  constexpr int kTerms = 30;
  const double n = kTerms;

  double sum = 0.0;
  for (int k = kTerms - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  sum += std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);

  // Tail corrections: B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * n^{-s-2k+1}.
  double rising = s;
  double power = std::pow(n, -s - 1.0);
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    sum += kBernoulliOverFactorial[k] * rising * power;
    rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
    power /= n * n;
  }
  return sum;
}

StitchingParams StitchingParams::for_bins(std::size_t bins, double alpha) {
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  validate_alpha(alpha);
  StitchingParams p;
  p.eta = std::numbers::e;
  p.s = 1.4;
  p.m = 1.0;
  p.c = 1.0;
  p.k1 = (std::pow(p.eta, 0.25) + std::pow(p.eta, -0.25)) / std::numbers::sqrt2;
  p.k2 = (std::sqrt(p.eta) + 1.0) / std::numbers::sqrt2;
  p.zeta_s = riemann_zeta(p.s);
  p.alpha_per_bin = alpha / (2.0 * static_cast<double>(bins));
  return p;
}

double StitchingParams::log_term(double v) const {
  const double epochs = std::log(v / m) / std::log(eta);
  return s * std::log1p(epochs) + std::log(zeta_s) - std::log(alpha_per_bin);
}

double stitched_boundary(double v, const StitchingParams& params) {
  if (!(v >= 0.0)) fail(ErrorKind::OutOfDomain, "variance process must be nonnegative");
  const double x = std::max(v, params.m);
  const double l = params.log_term(x);
  const double k2cl = params.k2 * params.c * l;
  return std::sqrt(params.k1 * params.k1 * x * l + k2cl * k2cl) + k2cl;
}

double closed_form_radius(const StreamBinState& state, std::size_t bins, double alpha) {
  if (state.count == 0) fail(ErrorKind::EmptyBin, "radius is undefined for an empty bin");
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  validate_alpha(alpha);
  const double v = state.variance_process();
  const double numerator = 7.0 * std::sqrt(v * std::log1p(std::log(v))) +
                           5.3 * std::log(6.3 * static_cast<double>(bins) / alpha);
  return numerator / static_cast<double>(state.count);
}

double stitched_radius(const StreamBinState& state, std::size_t bins, double alpha) {
  if (state.count == 0) fail(ErrorKind::EmptyBin, "radius is undefined for an empty bin");
  const auto params = StitchingParams::for_bins(bins, alpha);
  return stitched_boundary(state.variance_process(), params) /
         static_cast<double>(state.count);
}

StreamMode stream_mode_from_string(const std::string& name) {
  if (name == "closed" || name == "closed_form") return StreamMode::ClosedForm;
  if (name == "stitched") return StreamMode::Stitched;
  fail(ErrorKind::InvalidParameter, "unknown stream mode '" + name + "'");
}

Interval stream_interval(const StreamBinState& state, std::size_t bins, double alpha,
                         StreamMode mode) {
  const double r = mode == StreamMode::ClosedForm ? closed_form_radius(state, bins, alpha)
                                                  : stitched_radius(state, bins, alpha);
  return clipped_interval(state.mean, r);
}

StreamCalibrator::StreamCalibrator(BinningScheme scheme, double alpha, StreamMode mode)
    : scheme_(std::move(scheme)),
      alpha_(alpha),
      mode_(mode),
      params_(StitchingParams::for_bins(scheme_.bin_count(), alpha)),
      states_(scheme_.bin_count()) {}

std::size_t StreamCalibrator::observe(double score, int label) {
  const std::size_t bin = scheme_.assign(score);
  states_[bin] = states_[bin].update(label);
  ++observations_;
  return bin;
}

double StreamCalibrator::radius(std::size_t bin) const {
  const auto& st = states_.at(bin);
  if (st.count == 0) throw EmptyBinError(bin);
  if (mode_ == StreamMode::ClosedForm) {
    return closed_form_radius(st, scheme_.bin_count(), alpha_);
  }
  return stitched_boundary(st.variance_process(), params_) / static_cast<double>(st.count);
}

Interval StreamCalibrator::interval(std::size_t bin) const {
  return clipped_interval(states_.at(bin).mean, radius(bin));
}

}  // namespace dfcal
