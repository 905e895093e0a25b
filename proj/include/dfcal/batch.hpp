#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dfcal/binning.hpp"
#include "dfcal/tripod.hpp"

namespace dfcal {

/// Label statistics of one bin: N_b, the mean label and the (1/N)-normalized
/// empirical variance. Mean and variance are meaningful only when count >= 1.
struct BinStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;

  bool empty() const { return count == 0; }
};

/// Empirical-Bernstein radius valid simultaneously over B bins at level alpha:
///
///   sqrt(2 V ln(3B/alpha) / N) + 3 ln(3B/alpha) / N
double bernstein_radius(double variance, std::size_t count, std::size_t bins, double alpha);

/// Hoeffding lower bound on the smallest bin count under uniform-mass
/// binning: n/(2B) - sqrt(n ln(2B/alpha) / 2). May be negative.
double hoeffding_min_count_bound(std::size_t n, std::size_t bins, double alpha);

/// Histogram-binning calibrator h(x) = mean label of the bin containing x,
/// together with simultaneous per-bin confidence radii.
class CalibratorModel {
 public:
  CalibratorModel(BinningScheme scheme, std::vector<BinStats> stats, double alpha);

  const BinningScheme& scheme() const { return scheme_; }
  const std::vector<BinStats>& stats() const { return stats_; }
  double alpha() const { return alpha_; }

  /// Radius of a nonempty bin; 0 is stored for empty bins.
  const std::vector<double>& radii() const { return radii_; }
  double radius(std::size_t bin) const;

  /// Largest radius over nonempty bins. This is the calibration epsilon the
  /// CI-to-calibration conversion needs and is the reported default.
  double epsilon_star() const { return epsilon_star_; }

  /// Radius evaluated at the nonempty bin with the fewest points (lowest
  /// index on ties). Equals epsilon_star when all bins share a variance.
  double epsilon_at_min_count() const { return epsilon_min_count_; }
  std::size_t min_count_bin() const { return min_count_bin_; }

  std::size_t total_count() const;

  double predict(double score) const;
  Interval bin_interval(std::size_t bin) const;
  Interval predict_interval(double score) const;

 private:
  const BinStats& nonempty_bin(std::size_t bin) const;

  BinningScheme scheme_;
  std::vector<BinStats> stats_;
  double alpha_;
  std::vector<double> radii_;
  double epsilon_star_ = 0.0;
  double epsilon_min_count_ = 0.0;
  std::size_t min_count_bin_ = 0;
};

/// Per-bin mean and (1/N) variance of binary labels.
std::vector<BinStats> bin_statistics(const BinningScheme& scheme,
                                     std::span<const double> scores,
                                     std::span<const int> labels);

CalibratorModel fit(const BinningScheme& scheme, std::span<const double> scores,
                    std::span<const int> labels, double alpha);

void validate_alpha(double alpha);
void validate_labels(std::span<const int> labels);

}  // namespace dfcal
