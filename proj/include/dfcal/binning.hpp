#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dfcal {

enum class BinningKind { FixedWidth, UniformMass };

const char* to_string(BinningKind kind);
BinningKind binning_kind_from_string(const std::string& name);

/// Partition of [0, 1] into B intervals given by cut points
/// 0 = e_0 < e_1 < ... < e_B = 1.
///
/// Bin b (zero-based) is the half-open interval [e_b, e_{b+1}) except the
/// last one, which is closed at 1. A score sitting exactly on an interior
/// edge therefore belongs to the bin that starts there.
///
/// Schemes are immutable once constructed.
class BinningScheme {
 public:
  /// Validates the edge vector; throws DegeneratePartition when edges are not
  /// strictly increasing and InvalidParameter when the endpoints are not
  /// exactly 0 and 1.
  BinningScheme(std::vector<double> edges, BinningKind kind);

  std::size_t bin_count() const { return edges_.size() - 1; }
  BinningKind kind() const { return kind_; }
  const std::vector<double>& edges() const { return edges_; }

  double lower(std::size_t bin) const { return edges_.at(bin); }
  double upper(std::size_t bin) const { return edges_.at(bin + 1); }

  /// Zero-based bin index of `score`. Throws OutOfDomain outside [0, 1].
  std::size_t assign(double score) const;

  bool operator==(const BinningScheme&) const = default;

 private:
  std::vector<double> edges_;
  BinningKind kind_;
};

/// Edges (0, 1/B, ..., 1).
BinningScheme fixed_width_scheme(std::size_t bins);

/// Interior edges at the type-1 empirical quantiles: the j-th edge is the
/// ceil(j*n/B)-th order statistic of the scores. Ties that would collapse a
/// bin to zero width raise DegeneratePartition instead of silently merging.
BinningScheme uniform_mass_scheme(std::span<const double> scores, std::size_t bins);

struct BalanceReport {
  std::vector<double> frequency;
  std::vector<bool> bin_ok;
  bool balanced = false;
};

/// Empirical beta-well-balancedness: each bin's frequency among `scores`
/// must lie in [1/(beta*B), beta/B].
BalanceReport well_balanced_check(const BinningScheme& scheme,
                                  std::span<const double> scores, double beta);

/// Per-bin counts of `scores` under `scheme`.
std::vector<std::size_t> bin_counts(const BinningScheme& scheme,
                                    std::span<const double> scores);

}  // namespace dfcal
