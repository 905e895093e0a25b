#include "dfcal/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dfcal/errors.hpp"

namespace dfcal {

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::InvalidParameter, "alpha must lie in (0, 1)");
  }
}

void validate_labels(std::span<const int> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      fail(ErrorKind::InvalidInput,
           "label at index " + std::to_string(i) + " is not 0 or 1");
    }
  }
}

double bernstein_radius(double variance, std::size_t count, std::size_t bins,
                        double alpha) {
  if (count == 0) fail(ErrorKind::EmptyBin, "radius is undefined for an empty bin");
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  validate_alpha(alpha);
  if (!(variance >= 0.0)) fail(ErrorKind::InvalidParameter, "variance must be nonnegative");
  const double n = static_cast<double>(count);
  const double log_term = std::log(3.0 * static_cast<double>(bins) / alpha);
  return std::sqrt(2.0 * variance * log_term / n) + 3.0 * log_term / n;
}

double hoeffding_min_count_bound(std::size_t n, std::size_t bins, double alpha) {
  if (n == 0) fail(ErrorKind::InvalidParameter, "n must be at least 1");
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  validate_alpha(alpha);
  const double nd = static_cast<double>(n);
  const double b = static_cast<double>(bins);
  return nd / (2.0 * b) - std::sqrt(nd * std::log(2.0 * b / alpha) / 2.0);
}

CalibratorModel::CalibratorModel(BinningScheme scheme, std::vector<BinStats> stats,
                                 double alpha)
    : scheme_(std::move(scheme)), stats_(std::move(stats)), alpha_(alpha) {
  validate_alpha(alpha_);
  const std::size_t bins = scheme_.bin_count();
  if (stats_.size() != bins) {
    fail(ErrorKind::InvalidInput, "expected " + std::to_string(bins) +
                                      " bin statistics, got " +
                                      std::to_string(stats_.size()));
  }
  radii_.assign(bins, 0.0);
  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  bool any = false;
  for (std::size_t b = 0; b < bins; ++b) {
    const auto& s = stats_[b];
    if (s.empty()) continue;
    if (!(s.mean >= 0.0 && s.mean <= 1.0) || !(s.variance >= 0.0 && s.variance <= 0.25 + 1e-12)) {
      fail(ErrorKind::InvalidInput, "bin " + std::to_string(b) + " has inconsistent statistics");
    }
    any = true;
    radii_[b] = bernstein_radius(s.variance, s.count, bins, alpha_);
    epsilon_star_ = std::max(epsilon_star_, radii_[b]);
    if (s.count < min_count) {
      min_count = s.count;
      min_count_bin_ = b;
    }
  }
  if (!any) fail(ErrorKind::InvalidInput, "every bin is empty");
  epsilon_min_count_ = radii_[min_count_bin_];
}

double CalibratorModel::radius(std::size_t bin) const {
  nonempty_bin(bin);
  return radii_[bin];
}

std::size_t CalibratorModel::total_count() const {
  std::size_t n = 0;
  for (const auto& s : stats_) n += s.count;
  return n;
}

const BinStats& CalibratorModel::nonempty_bin(std::size_t bin) const {
  if (bin >= stats_.size()) {
    fail(ErrorKind::InvalidInput, "bin index " + std::to_string(bin) + " out of range");
  }
  if (stats_[bin].empty()) throw EmptyBinError(bin);
  return stats_[bin];
}

double CalibratorModel::predict(double score) const {
  return nonempty_bin(scheme_.assign(score)).mean;
}

Interval CalibratorModel::bin_interval(std::size_t bin) const {
  return clipped_interval(nonempty_bin(bin).mean, radii_[bin]);
}

Interval CalibratorModel::predict_interval(double score) const {
  return bin_interval(scheme_.assign(score));
}

std::vector<BinStats> bin_statistics(const BinningScheme& scheme,
                                     std::span<const double> scores,
                                     std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorKind::InvalidInput, "scores and labels differ in length (" +
                                      std::to_string(scores.size()) + " vs " +
                                      std::to_string(labels.size()) + ")");
  }
  validate_labels(labels);
  const std::size_t bins = scheme.bin_count();
  std::vector<std::size_t> index(scores.size());
  std::vector<BinStats> stats(bins);
  std::vector<double> sums(bins, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    index[i] = scheme.assign(scores[i]);
    ++stats[index[i]].count;
    sums[index[i]] += labels[i];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (stats[b].count > 0) stats[b].mean = sums[b] / static_cast<double>(stats[b].count);
  }
  std::vector<double> squares(bins, 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = labels[i] - stats[index[i]].mean;
    squares[index[i]] += d * d;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (stats[b].count > 0) {
      stats[b].variance = squares[b] / static_cast<double>(stats[b].count);
    }
  }
  return stats;
}

CalibratorModel fit(const BinningScheme& scheme, std::span<const double> scores,
                    std::span<const int> labels, double alpha) {
  if (scores.empty()) fail(ErrorKind::InvalidInput, "no calibration points");
  return CalibratorModel(scheme, bin_statistics(scheme, scores, labels), alpha);
}

}  // namespace dfcal
