#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dfcal/binning.hpp"
#include "dfcal/density_ratio.hpp"
#include "dfcal/tripod.hpp"

namespace dfcal {

class CounterRng;

struct BetaParams {
  double a = 1.0;
  double b = 1.0;

  void validate() const;
};

/// Inverse CDF of Beta(a, b) at u in (0, 1).
double beta_quantile(const BetaParams& p, double u);
/// CDF of Beta(a, b) at x in [0, 1].
double beta_cdf(const BetaParams& p, double x);

/// Product-Beta covariate shift with labels P(Y=1|x) = (1 + sin(omega |x|^2)) / 2
/// shared by both domains.
struct SyntheticShiftConfig {
  std::size_t dim = 3;
  BetaParams source{1.0, 1.0};
  BetaParams target{2.0, 1.0};
  double omega = 20.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Uniform source, Beta(2,1) target, d = 3, omega = 20. The likelihood ratio
/// is 8 x1 x2 x3.
SyntheticShiftConfig reference_shift_config(std::uint64_t seed = 0);

double label_probability(const SyntheticShiftConfig& cfg, std::span<const double> x);

/// Closed-form product-Beta density ratio dP_target/dP_source at x in [0,1]^d.
double true_ratio(const SyntheticShiftConfig& cfg, std::span<const double> x);
Eigen::VectorXd true_ratio(const SyntheticShiftConfig& cfg, const Eigen::MatrixXd& x);

struct LabeledSample {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

struct ShiftData {
  LabeledSample source;
  LabeledSample target;
};

/// Draws from stream `stream` of the configured seed. Pure in (cfg, sizes, stream).
ShiftData gen_shift_data(const SyntheticShiftConfig& cfg, std::size_t n_source,
                         std::size_t n_target, std::uint64_t stream = 0);

/// Draws n rows from `params` in every coordinate, labelling each with the
/// config's label function.
LabeledSample sample_domain(const SyntheticShiftConfig& cfg, const BetaParams& params,
                            std::size_t n, CounterRng& rng);

/// Base scorers standing in for a trained classifier.
///  SquaredProbability: s(x) = eta(x)^2, informative but miscalibrated.
///  PartialFeature:     eta evaluated with the last coordinate's square replaced
///                      by its source-domain mean, also squared. Needs d >= 2.
enum class Scorer { SquaredProbability, PartialFeature };

const char* to_string(Scorer s);
Scorer scorer_from_string(const std::string& name);

double score(const SyntheticShiftConfig& cfg, Scorer scorer, std::span<const double> x);
std::vector<double> scores(const SyntheticShiftConfig& cfg, Scorer scorer, const Eigen::MatrixXd& x);

struct BinMoment {
  /// P(score in bin) under the chosen domain.
  double mass = 0.0;
  /// E[eta(X) | score in bin]; NaN when the bin has no mass.
  double mean = 0.0;
};

/// Per-bin probability mass and conditional label mean of a domain, by
/// numerical integration. Each coordinate's square is discretized into
/// `cells` cells of equal width using the exact Beta CDF, and the sum of
/// squares is obtained by convolution. Accuracy is O(1/cells).
class BinMomentOracle {
 public:
  BinMomentOracle(const SyntheticShiftConfig& cfg, const BetaParams& domain, Scorer scorer,
                  std::size_t cells = 4096);

  std::vector<BinMoment> moments(const BinningScheme& scheme) const;

  /// Discretized law of the visible sum of squares: masses on the points
  /// (j + k/2) / cells, k = number of visible coordinates.
  const std::vector<double>& visible_masses() const { return masses_; }
  std::size_t cells() const { return cells_; }

 private:
  std::size_t cells_;
  std::vector<double> masses_;
  std::vector<double> scores_;
  std::vector<double> eta_;
};

/// Scores uniform on [0, 1], labels fair coins independent of the scores.
struct AdversaryData {
  std::vector<double> scores;
  std::vector<int> labels;
};

AdversaryData gen_adversary(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// p(s) = 1 / (1 + exp(A s + B)) with A < 0.
struct PlattModel {
  double slope = 0.0;
  double intercept = 0.0;
  int iterations = 0;
  /// Slope ended on a constraint: near zero (no increasing fit exists) or at
  /// the steepness cap (separable data).
  bool at_boundary = false;

  double operator()(double s) const;
};

inline constexpr double kPlattMinSlope = 1e-6;
inline constexpr double kPlattMaxSlope = 1e3;

/// Maximum-likelihood fit by damped projected Newton iterations on
/// A in [-kPlattMaxSlope, -kPlattMinSlope]. At most 100 iterations with a
/// mean-gradient tolerance of 1e-8; single-class labels raise DegenerateBin,
/// non-convergence raises Numeric.
PlattModel platt_fit(std::span<const double> scores, std::span<const int> labels);

double platt_nll(const PlattModel& m, std::span<const double> scores, std::span<const int> labels);

/// Sample sizes for one covariate-shift trial.
struct ShiftTrialSizes {
  std::size_t quantile = 1940;
  std::size_t calibration = 7840;
  std::size_t ratio_source = 2000;
  std::size_t ratio_target = 2000;
  std::size_t test = 28000;
  std::size_t count_source = 8500;
  std::size_t count_target = 8000;
};

struct ShiftTrialOptions {
  ShiftTrialSizes sizes;
  std::size_t bins = 10;
  std::size_t eval_bins = 10;
  double alpha = 0.1;
  double c = 2.0;
  Scorer scorer = Scorer::SquaredProbability;
  /// Skipping uLSIF leaves the estimated-ratio fields NaN.
  bool estimate_ratio = true;
  UlsifOptions ulsif;
};

struct ShiftTrialResult {
  std::uint64_t trial = 0;
  double ece_uncalibrated = 0.0;
  double ece_unweighted = 0.0;
  double ece_oracle = 0.0;
  double ece_shift = 0.0;
  double ece_count_ratio = 0.0;
  /// Oracle-weight self-normalized intervals with the bounded-ratio radius.
  double oracle_radius = 0.0;
  bool oracle_sample_size_ok = false;
  bool oracle_covered = false;
  /// Oracle-weight estimator with the exact relative mass and its Bernstein radii.
  bool relmass_covered = false;
  double relmass_max_radius = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;

  /// Per-bin detail on the calibration scheme; estimated-ratio columns are
  /// NaN when uLSIF was skipped.
  std::vector<double> edges;
  std::vector<double> target_mean;
  std::vector<double> unweighted;
  std::vector<double> oracle;
  std::vector<double> shift;
  std::vector<double> count_ratio;
};

/// One trial on stream `trial` of cfg.seed. The two oracles supply the target
/// bin means and the exact relative masses used for coverage.
ShiftTrialResult run_shift_trial(const SyntheticShiftConfig& cfg, const ShiftTrialOptions& opt,
                                 const BinMomentOracle& target_oracle,
                                 const BinMomentOracle& source_oracle, std::uint64_t trial);

struct AdversaryTrialOptions {
  std::size_t n = 5000;
  std::size_t quantile = 1000;
  std::size_t test = 5000;
  std::size_t bins = 10;
  double alpha = 0.1;
  /// A trial counts as a Platt failure when at least this fraction of test
  /// outputs sits farther than n^{-1/3} from 1/2.
  double fail_fraction = 0.1;
};

struct AdversaryTrialResult {
  std::uint64_t trial = 0;
  std::vector<Interval> bin_intervals;
  bool binned_covered = false;
  PlattModel platt;
  double epsilon = 0.0;
  double outside_fraction = 0.0;
  double max_deviation = 0.0;
  bool platt_failed = false;
};

/// Histogram binning and Platt scaling fitted on the same adversary sample
/// drawn from stream `trial` of `seed`; the bin edges come from a separate
/// quantile sample.
AdversaryTrialResult run_adversary_trial(const AdversaryTrialOptions& opt, std::uint64_t seed,
                                         std::uint64_t trial);

}  // namespace dfcal
