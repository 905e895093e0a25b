#include "dfcal/covariate_shift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfcal/batch.hpp"
#include "dfcal/errors.hpp"

namespace dfcal {

namespace {

void check_lengths(std::size_t scores, std::size_t labels, std::size_t weights) {
  if (scores != labels || scores != weights) {
    fail(ErrorKind::InvalidInput, "scores, labels and weights differ in length");
  }
  if (scores == 0) fail(ErrorKind::InvalidInput, "no calibration points");
}

}  // namespace

void WeightBounds::validate() const {
  if (!(lower > 0.0 && lower <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "weight lower bound must lie in (0, 1]");
  }
  if (!(upper >= 1.0 && std::isfinite(upper))) {
    fail(ErrorKind::InvalidParameter, "weight upper bound must be finite and at least 1");
  }
}

ShiftRadius weighted_shift_radius(const WeightBounds& bounds, std::size_t bins,
                                  std::size_t n, double alpha, double c) {
  bounds.validate();
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  if (n == 0) fail(ErrorKind::InvalidParameter, "n must be at least 1");
  validate_alpha(alpha);
  if (!(c > 0.0)) fail(ErrorKind::InvalidParameter, "constant c must be positive");
  const double ratio = bounds.upper / bounds.lower;
  const double b = static_cast<double>(bins);
  const double log_term = std::log(6.0 * b / alpha);
  ShiftRadius out;
  out.radius = c * ratio * ratio * std::sqrt(b * log_term / (2.0 * static_cast<double>(n)));
  out.sample_size_ok = static_cast<double>(n) >= c * ratio * ratio * b * log_term * log_term;
  return out;
}

ShiftModel::ShiftModel(BinningScheme scheme, std::vector<ShiftBinEstimate> bins,
                       WeightBounds bounds, double alpha, double c)
    : scheme_(std::move(scheme)), bins_(std::move(bins)), bounds_(bounds), alpha_(alpha), c_(c) {
  bounds_.validate();
  validate_alpha(alpha_);
  if (bins_.size() != scheme_.bin_count()) {
    fail(ErrorKind::InvalidInput, "bin estimate count does not match the scheme");
  }
  for (const auto& b : bins_) n_ += b.count;
  if (n_ == 0) fail(ErrorKind::InvalidInput, "every bin is empty");
}

ShiftRadius ShiftModel::radius() const {
  return weighted_shift_radius(bounds_, scheme_.bin_count(), n_, alpha_, c_);
}

const ShiftBinEstimate& ShiftModel::nonempty_bin(std::size_t bin) const {
  if (bin >= bins_.size()) {
    fail(ErrorKind::InvalidInput, "bin index " + std::to_string(bin) + " out of range");
  }
  if (bins_[bin].empty()) throw EmptyBinError(bin);
  return bins_[bin];
}

double ShiftModel::predict(double score) const {
  return nonempty_bin(scheme_.assign(score)).weighted_mean;
}

Interval ShiftModel::bin_interval(std::size_t bin) const {
  return clipped_interval(nonempty_bin(bin).weighted_mean, radius().radius);
}

std::vector<ShiftBinEstimate> weighted_bin_estimates(const BinningScheme& scheme,
                                                     std::span<const double> scores,
                                                     std::span<const int> labels,
                                                     std::span<const double> weights) {
  check_lengths(scores.size(), labels.size(), weights.size());
  validate_labels(labels);
  const std::size_t bins = scheme.bin_count();
  std::vector<ShiftBinEstimate> est(bins);
  std::vector<double> weighted_labels(bins, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0 && std::isfinite(w))) {
      std::ostringstream msg;
      msg << "weight " << w << " at index " << i << " is negative or non-finite";
      fail(ErrorKind::BoundsViolation, msg.str());
    }
    const std::size_t b = scheme.assign(scores[i]);
    ++est[b].count;
    est[b].weight_sum += w;
    weighted_labels[b] += w * labels[i];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    auto& e = est[b];
    if (e.empty()) continue;
    if (!(e.weight_sum > 0.0)) {
      fail(ErrorKind::DegenerateBin, "weights in bin " + std::to_string(b) + " sum to zero");
    }
    e.weighted_mean = std::min(1.0, weighted_labels[b] / e.weight_sum);
    e.weight_mean = e.weight_sum / static_cast<double>(e.count);
    e.rel_mass = 1.0 / e.weight_mean;
  }
  return est;
}

ShiftModel fit_weighted(const BinningScheme& scheme, std::span<const double> scores,
                        std::span<const int> labels, std::span<const double> weights,
                        double alpha, const WeightBounds& bounds, double c) {
  bounds.validate();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= bounds.lower && w <= bounds.upper)) {
      std::ostringstream msg;
      msg << "weight " << w << " at index " << i << " is outside [" << bounds.lower << ", "
          << bounds.upper << "]";
      fail(ErrorKind::BoundsViolation, msg.str());
    }
  }
  return ShiftModel(scheme, weighted_bin_estimates(scheme, scores, labels, weights), bounds,
                    alpha, c);
}

double RelativeMassEstimate::clipped_mean() const { return std::clamp(mean, 0.0, 1.0); }

std::vector<RelativeMassEstimate> fit_relative_mass_weighted(
    const BinningScheme& scheme, std::span<const double> scores, std::span<const int> labels,
    std::span<const double> weights, std::span<const double> rel_mass, double alpha,
    double upper) {
  check_lengths(scores.size(), labels.size(), weights.size());
  validate_alpha(alpha);
  validate_labels(labels);
  const std::size_t bins = scheme.bin_count();
  if (rel_mass.size() != bins) {
    fail(ErrorKind::InvalidInput, "relative mass vector must have one entry per bin");
  }
  for (double m : rel_mass) {
    if (!(m > 0.0 && std::isfinite(m))) {
      fail(ErrorKind::InvalidParameter, "relative masses must be positive and finite");
    }
  }
  if (!(upper > 0.0 && std::isfinite(upper))) {
    fail(ErrorKind::InvalidParameter, "weight upper bound must be positive and finite");
  }

  std::vector<std::size_t> index(scores.size());
  std::vector<RelativeMassEstimate> est(bins);
  std::vector<double> sums(bins, 0.0);
  std::vector<double> weight_sums(bins, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0 && w <= upper)) {
      std::ostringstream msg;
      msg << "weight " << w << " at index " << i << " is outside [0, " << upper << "]";
      fail(ErrorKind::BoundsViolation, msg.str());
    }
    index[i] = scheme.assign(scores[i]);
    ++est[index[i]].count;
    sums[index[i]] += rel_mass[index[i]] * w * labels[i];
    weight_sums[index[i]] += w;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (est[b].count > 0) {
      if (!(weight_sums[b] > 0.0)) {
        fail(ErrorKind::DegenerateBin, "weights in bin " + std::to_string(b) + " sum to zero");
      }
      est[b].mean = sums[b] / static_cast<double>(est[b].count);
    }
  }
  std::vector<double> squares(bins, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::size_t b = index[i];
    const double d = rel_mass[b] * weights[i] * labels[i] - est[b].mean;
    squares[b] += d * d;
  }
  const double log_term = std::log(3.0 * static_cast<double>(bins) / alpha);
  for (std::size_t b = 0; b < bins; ++b) {
    auto& e = est[b];
    if (e.empty()) continue;
    const double n = static_cast<double>(e.count);
    e.variance = squares[b] / n;
    e.radius = std::sqrt(2.0 * e.variance * log_term / n) + 3.0 * rel_mass[b] * upper * log_term / n;
  }
  return est;
}

std::vector<double> count_ratio_rel_mass(std::span<const std::size_t> source_counts,
                                         std::span<const std::size_t> target_counts) {
  if (source_counts.size() != target_counts.size() || source_counts.empty()) {
    fail(ErrorKind::InvalidInput, "source and target bin counts must have equal, nonzero length");
  }
  double ns = 0.0;
  double nt = 0.0;
  for (auto c : source_counts) ns += static_cast<double>(c);
  for (auto c : target_counts) nt += static_cast<double>(c);
  if (ns == 0.0) fail(ErrorKind::InvalidInput, "source sample is empty");
  std::vector<double> m(source_counts.size());
  for (std::size_t b = 0; b < m.size(); ++b) {
    if (target_counts[b] == 0) {
      fail(ErrorKind::DegenerateBin, "target bin " + std::to_string(b) + " has no points");
    }
    m[b] = (static_cast<double>(source_counts[b]) / ns) /
           (static_cast<double>(target_counts[b]) / nt);
  }
  return m;
}

}  // namespace dfcal
