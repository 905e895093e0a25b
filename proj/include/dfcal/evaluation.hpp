#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfcal/binning.hpp"
#include "dfcal/tripod.hpp"

namespace dfcal {

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  /// Fraction of all predictions falling in this bin.
  double proportion = 0.0;
  /// Both absent for empty bins.
  std::optional<double> fraction_positive;
  std::optional<double> mean_predicted;
};

struct ReliabilityReport {
  std::vector<ReliabilityBin> bins;
  /// sum_b proportion_b * |mean_predicted_b - fraction_positive_b|
  double ece = 0.0;
};

/// Reliability-diagram data and l1-ECE over `eval_bins` evaluation bins on the
/// prediction axis. Fixed-width bins by default; uniform-mass bins (quantiles
/// of the predictions themselves) are available for diagnostics.
ReliabilityReport reliability(std::span<const double> predictions, std::span<const int> labels,
                              std::size_t eval_bins,
                              BinningKind kind = BinningKind::FixedWidth);

/// Same computation on an explicit evaluation scheme.
ReliabilityReport reliability(std::span<const double> predictions, std::span<const int> labels,
                              const BinningScheme& scheme);

/// Fraction of indices with lower <= truth <= upper.
double coverage_rate(std::span<const Interval> intervals, std::span<const double> truths);

/// Standalone SVG document: diagonal reference, per-bin markers sized by mass.
std::string reliability_svg(const ReliabilityReport& report, const std::string& title = {});

}  // namespace dfcal
