#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace dfcal {

/// `count` geometrically spaced values from `lo` to `hi`, endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct UlsifOptions {
  std::vector<double> sigma_grid = log_grid(1e-2, 1e2, 25);
  std::vector<double> lambda_grid = log_grid(1e-3, 1e3, 100);
  std::size_t n_centers = 100;
  /// Seeds the choice of kernel centers among the target points.
  std::uint64_t seed = 0;
};

/// Gaussian-kernel expansion of the likelihood ratio dP_target / dP_source:
///
///   w(x) = max(0, sum_l theta_l exp(-|x - c_l|^2 / (2 sigma^2)))
///
/// then clipped to [clip_lower, clip_upper]. Nonnegative everywhere.
class RatioModel {
 public:
  RatioModel(Eigen::MatrixXd centers, double sigma, double lambda, Eigen::VectorXd theta,
             double clip_lower = 0.0,
             double clip_upper = std::numeric_limits<double>::infinity());

  std::size_t dim() const { return static_cast<std::size_t>(centers_.cols()); }
  const Eigen::MatrixXd& centers() const { return centers_; }
  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double clip_lower() const { return clip_lower_; }
  double clip_upper() const { return clip_upper_; }

  /// Leave-one-out score of the selected (sigma, lambda); NaN when the model
  /// was not produced by cross-validation.
  double cv_score() const { return cv_score_; }
  void set_cv_score(double score) { cv_score_ = score; }

  double operator()(std::span<const double> x) const;
  /// One value per row of `x`.
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& x) const;

  [[nodiscard]] RatioModel clipped(double lower, double upper) const;

 private:
  Eigen::MatrixXd centers_;
  double sigma_;
  double lambda_;
  Eigen::VectorXd theta_;
  double clip_lower_;
  double clip_upper_;
  double cv_score_ = std::numeric_limits<double>::quiet_NaN();
};

/// Unconstrained least-squares importance fitting. Rows of `source` and
/// `target` are feature vectors. Kernel centers are min(n_centers, |target|)
/// target points; sigma and lambda are chosen on the grids by the closed-form
/// leave-one-out criterion.
RatioModel fit_ulsif(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                     const UlsifOptions& options = {});

/// Ridge solve at fixed (sigma, lambda) with explicit centers.
RatioModel fit_ulsif_at(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& centers, double sigma, double lambda);

}  // namespace dfcal
