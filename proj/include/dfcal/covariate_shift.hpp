#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dfcal/binning.hpp"
#include "dfcal/tripod.hpp"

namespace dfcal {

/// Lower and upper bounds L <= w(x) <= U on the likelihood ratio, with
/// 0 < L <= 1 <= U < infinity.
struct WeightBounds {
  double lower = 1.0;
  double upper = 1.0;

  void validate() const;
};

/// Self-normalized importance-weighted label mean of one bin.
struct ShiftBinEstimate {
  std::size_t count = 0;
  double weight_sum = 0.0;
  /// sum w_i y_i / sum w_i
  double weighted_mean = 0.0;
  /// r_b = sum w_i / N_b; estimates 1/m_b
  double weight_mean = 0.0;
  /// m_b = 1 / r_b, the relative mass P(bin) / P_target(bin)
  double rel_mass = 0.0;

  bool empty() const { return count == 0; }
};

struct ShiftRadius {
  double radius = 0.0;
  /// Whether n >= c (U/L)^2 B ln^2(6B/alpha), the sample size the bound needs.
  bool sample_size_ok = false;
};

/// Simultaneous radius of the self-normalized estimator under bounded weights:
///
///   c (U/L)^2 sqrt(B ln(6B/alpha) / (2n))
///
/// The constant c is not pinned by the theory; 2 is the default.
ShiftRadius weighted_shift_radius(const WeightBounds& bounds, std::size_t bins,
                                  std::size_t n, double alpha, double c = 2.0);

/// Histogram binning calibrated for a covariate-shifted target domain using
/// labelled source data and importance weights.
class ShiftModel {
 public:
  ShiftModel(BinningScheme scheme, std::vector<ShiftBinEstimate> bins, WeightBounds bounds,
             double alpha, double c = 2.0);

  const BinningScheme& scheme() const { return scheme_; }
  const std::vector<ShiftBinEstimate>& bins() const { return bins_; }
  const WeightBounds& bounds() const { return bounds_; }
  double alpha() const { return alpha_; }
  double c() const { return c_; }
  std::size_t total_count() const { return n_; }

  /// Same radius for every bin.
  ShiftRadius radius() const;

  double predict(double score) const;
  Interval bin_interval(std::size_t bin) const;

 private:
  const ShiftBinEstimate& nonempty_bin(std::size_t bin) const;

  BinningScheme scheme_;
  std::vector<ShiftBinEstimate> bins_;
  WeightBounds bounds_;
  double alpha_;
  double c_;
  std::size_t n_ = 0;
};

/// Self-normalized point estimates without a bound check; weights need only be
/// nonnegative and finite. Used where no (L, U) pair is available, e.g. with
/// an estimated ratio that touches zero.
std::vector<ShiftBinEstimate> weighted_bin_estimates(const BinningScheme& scheme,
                                                     std::span<const double> scores,
                                                     std::span<const int> labels,
                                                     std::span<const double> weights);

/// Fits the self-normalized estimator. Every weight must lie in [L, U]
/// (BoundsViolation otherwise); a nonempty bin whose weights sum to zero
/// raises DegenerateBin.
ShiftModel fit_weighted(const BinningScheme& scheme, std::span<const double> scores,
                        std::span<const int> labels, std::span<const double> weights,
                        double alpha, const WeightBounds& bounds, double c = 2.0);

/// Estimator that scales weighted labels by a known relative mass m_b:
///
///   pi_b = (1/N_b) sum m_b w_i y_i
///   V_b  = (1/N_b) sum (m_b w_i y_i - pi_b)^2
///   radius = sqrt(2 V_b ln(3B/alpha) / N_b) + 3 m_b U ln(3B/alpha) / N_b
///
/// `mean` may exceed 1; `clipped_mean()` is the convenience accessor.
struct RelativeMassEstimate {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double radius = 0.0;

  bool empty() const { return count == 0; }
  double clipped_mean() const;
};

std::vector<RelativeMassEstimate> fit_relative_mass_weighted(
    const BinningScheme& scheme, std::span<const double> scores, std::span<const int> labels,
    std::span<const double> weights, std::span<const double> rel_mass, double alpha,
    double upper);

/// Relative mass from bin counts of unlabeled samples:
///
///   m_b = (source_b / n_s) / (target_b / n_t)
///
/// Fragile when a target bin is sparsely populated; the self-normalized
/// estimator is preferred. A zero target count raises DegenerateBin.
std::vector<double> count_ratio_rel_mass(std::span<const std::size_t> source_counts,
                                         std::span<const std::size_t> target_counts);

}  // namespace dfcal
