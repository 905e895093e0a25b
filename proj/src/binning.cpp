#include "dfcal/binning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfcal/errors.hpp"

namespace dfcal {

const char* to_string(BinningKind kind) {
  return kind == BinningKind::FixedWidth ? "fixed_width" : "uniform_mass";
}

BinningKind binning_kind_from_string(const std::string& name) {
  if (name == "fixed_width" || name == "fixed") return BinningKind::FixedWidth;
  if (name == "uniform_mass" || name == "uniform-mass") return BinningKind::UniformMass;
  fail(ErrorKind::InvalidParameter, "unknown binning kind '" + name + "'");
}

BinningScheme::BinningScheme(std::vector<double> edges, BinningKind kind)
    : edges_(std::move(edges)), kind_(kind) {
  if (edges_.size() < 2) {
    fail(ErrorKind::InvalidParameter, "a binning scheme needs at least two edges");
  }
  if (edges_.front() != 0.0 || edges_.back() != 1.0) {
    fail(ErrorKind::InvalidParameter, "binning edges must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) {
      std::ostringstream msg;
      msg << "edges " << i - 1 << " and " << i << " (" << edges_[i - 1] << ", "
          << edges_[i] << ") do not increase strictly";
      fail(ErrorKind::DegeneratePartition, msg.str());
    }
  }
}

std::size_t BinningScheme::assign(double score) const {
  if (!(score >= 0.0 && score <= 1.0)) {
    std::ostringstream msg;
    msg << "score " << score << " is outside [0, 1]";
    fail(ErrorKind::OutOfDomain, msg.str());
  }
  const auto interior_begin = edges_.begin() + 1;
  const auto interior_end = edges_.end() - 1;
  return static_cast<std::size_t>(
      std::upper_bound(interior_begin, interior_end, score) - interior_begin);
}

BinningScheme fixed_width_scheme(std::size_t bins) {
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  }
  return BinningScheme(std::move(edges), BinningKind::FixedWidth);
}

BinningScheme uniform_mass_scheme(std::span<const double> scores, std::size_t bins) {
  if (bins == 0) fail(ErrorKind::InvalidParameter, "bin count must be at least 1");
  const std::size_t n = scores.size();
  if (n < bins) {
    fail(ErrorKind::InvalidInput, "uniform-mass binning needs at least " +
                                      std::to_string(bins) + " scores, got " +
                                      std::to_string(n));
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  for (double s : sorted) {
    if (!(s >= 0.0 && s <= 1.0)) {
      std::ostringstream msg;
      msg << "score " << s << " is outside [0, 1]";
      fail(ErrorKind::OutOfDomain, msg.str());
    }
  }
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> edges;
  edges.reserve(bins + 1);
  edges.push_back(0.0);
  for (std::size_t j = 1; j < bins; ++j) {
    const std::size_t rank = (j * n + bins - 1) / bins;  // ceil(j n / B), 1-based
    const double q = sorted[rank - 1];
    if (!(q > edges.back()) || q >= 1.0) {
      std::ostringstream msg;
      msg << "quantiles " << j - 1 << " and " << j << " collide at " << q
          << "; reduce the bin count";
      fail(ErrorKind::DegeneratePartition, msg.str());
    }
    // Ties at q that leave the bin below it without calibration points.
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), q);
    const auto prev = std::lower_bound(sorted.begin(), sorted.end(), edges.back());
    if (below == prev && below + 1 != sorted.end() && *(below + 1) == q) {
      std::ostringstream msg;
      msg << "quantiles " << j - 1 << " and " << j << " collide at " << q
          << " (tied scores leave bin " << j - 1 << " empty); reduce the bin count";
      fail(ErrorKind::DegeneratePartition, msg.str());
    }
    edges.push_back(q);
  }
  edges.push_back(1.0);
  return BinningScheme(std::move(edges), BinningKind::UniformMass);
}

std::vector<std::size_t> bin_counts(const BinningScheme& scheme,
                                    std::span<const double> scores) {
  std::vector<std::size_t> counts(scheme.bin_count(), 0);
  for (double s : scores) ++counts[scheme.assign(s)];
  return counts;
}

BalanceReport well_balanced_check(const BinningScheme& scheme,
                                  std::span<const double> scores, double beta) {
  if (scores.empty()) fail(ErrorKind::InvalidInput, "no scores to check");
  if (!(beta >= 1.0)) fail(ErrorKind::InvalidParameter, "beta must be at least 1");

  const auto counts = bin_counts(scheme, scores);
  const double bins = static_cast<double>(scheme.bin_count());
  const double lo = 1.0 / (beta * bins);
  const double hi = beta / bins;

  BalanceReport report;
  report.balanced = true;
  for (std::size_t c : counts) {
    const double f = static_cast<double>(c) / static_cast<double>(scores.size());
    const bool ok = f >= lo && f <= hi;
    report.frequency.push_back(f);
    report.bin_ok.push_back(ok);
    report.balanced = report.balanced && ok;
  }
  return report;
}

}  // namespace dfcal
