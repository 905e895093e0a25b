#include "dfcal/density_ratio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dfcal/errors.hpp"
#include "dfcal/rng.hpp"

namespace dfcal {

namespace {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd squared_distances(const MatrixXd& x, const MatrixXd& centers) {
  const VectorXd xn = x.rowwise().squaredNorm();
  const VectorXd cn = centers.rowwise().squaredNorm();
  MatrixXd d = -2.0 * x * centers.transpose();
  d.colwise() += xn;
  d.rowwise() += cn.transpose();
  return d.cwiseMax(0.0);
}

MatrixXd gaussian_kernel(const MatrixXd& sq_dist, double sigma) {
  return (sq_dist.array() * (-0.5 / (sigma * sigma))).exp().matrix();
}

void check_samples(const MatrixXd& source, const MatrixXd& target) {
  if (source.rows() == 0 || target.rows() == 0) {
    fail(ErrorKind::InvalidInput, "source and target samples must be nonempty");
  }
  if (source.cols() == 0 || source.cols() != target.cols()) {
    fail(ErrorKind::InvalidInput, "source and target feature dimensions differ");
  }
  if (!source.allFinite() || !target.allFinite()) {
    fail(ErrorKind::InvalidInput, "samples contain non-finite values");
  }
}

VectorXd ridge_solve(const MatrixXd& h_mat, const VectorXd& h_vec, double lambda) {
  MatrixXd system = h_mat;
  system.diagonal().array() += lambda;
  Eigen::LLT<MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "ridge system is singular at lambda=" << lambda;
    fail(ErrorKind::Numeric, msg.str());
  }
  VectorXd theta = llt.solve(h_vec);
  if (!theta.allFinite()) {
    std::ostringstream msg;
    msg << "ridge solve produced non-finite coefficients at lambda=" << lambda;
    fail(ErrorKind::Numeric, msg.str());
  }
  return theta;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count == 0) {
    fail(ErrorKind::InvalidParameter, "log grid needs 0 < lo <= hi and count >= 1");
  }
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double step = (std::log10(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::pow(10.0, a + step * static_cast<double>(i));
  }
  return grid;
}

RatioModel::RatioModel(MatrixXd centers, double sigma, double lambda, VectorXd theta,
                       double clip_lower, double clip_upper)
    : centers_(std::move(centers)),
      sigma_(sigma),
      lambda_(lambda),
      theta_(std::move(theta)),
      clip_lower_(clip_lower),
      clip_upper_(clip_upper) {
  if (centers_.rows() == 0 || centers_.rows() != theta_.size()) {
    fail(ErrorKind::InvalidInput, "ratio model needs one coefficient per center");
  }
  if (!(sigma_ > 0.0)) fail(ErrorKind::InvalidParameter, "kernel bandwidth must be positive");
  if (!(clip_lower_ >= 0.0 && clip_upper_ >= clip_lower_)) {
    fail(ErrorKind::InvalidParameter, "clip bounds must satisfy 0 <= lower <= upper");
  }
}

double RatioModel::operator()(std::span<const double> x) const {
  if (x.size() != dim()) {
    fail(ErrorKind::InvalidInput, "point has dimension " + std::to_string(x.size()) +
                                      ", model expects " + std::to_string(dim()));
  }
  const Eigen::Map<const Eigen::RowVectorXd> point(x.data(), static_cast<Eigen::Index>(x.size()));
  const double scale = -0.5 / (sigma_ * sigma_);
  double value = 0.0;
  for (Eigen::Index l = 0; l < centers_.rows(); ++l) {
    value += theta_[l] * std::exp(scale * (centers_.row(l) - point).squaredNorm());
  }
  return std::clamp(std::max(0.0, value), clip_lower_, clip_upper_);
}

VectorXd RatioModel::evaluate(const MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim()) {
    fail(ErrorKind::InvalidInput, "points have dimension " + std::to_string(x.cols()) +
                                      ", model expects " + std::to_string(dim()));
  }
  VectorXd values = gaussian_kernel(squared_distances(x, centers_), sigma_) * theta_;
  return values.cwiseMax(0.0).cwiseMax(clip_lower_).cwiseMin(clip_upper_);
}

RatioModel RatioModel::clipped(double lower, double upper) const {
  RatioModel copy(centers_, sigma_, lambda_, theta_, lower, upper);
  copy.cv_score_ = cv_score_;
  return copy;
}

RatioModel fit_ulsif_at(const MatrixXd& source, const MatrixXd& target, const MatrixXd& centers,
                        double sigma, double lambda) {
  check_samples(source, target);
  if (centers.cols() != source.cols() || centers.rows() == 0) {
    fail(ErrorKind::InvalidInput, "kernel centers have the wrong dimension");
  }
  if (!(lambda > 0.0)) fail(ErrorKind::InvalidParameter, "ridge parameter must be positive");
  const MatrixXd phi_src = gaussian_kernel(squared_distances(source, centers), sigma);
  const MatrixXd phi_tgt = gaussian_kernel(squared_distances(target, centers), sigma);
  const MatrixXd h_mat = phi_src.transpose() * phi_src / static_cast<double>(source.rows());
  const VectorXd h_vec = phi_tgt.colwise().mean().transpose();
  return RatioModel(centers, sigma, lambda, ridge_solve(h_mat, h_vec, lambda));
}

RatioModel fit_ulsif(const MatrixXd& source, const MatrixXd& target, const UlsifOptions& options) {
  check_samples(source, target);
  if (options.sigma_grid.empty() || options.lambda_grid.empty()) {
    fail(ErrorKind::InvalidInput, "sigma and lambda grids must be nonempty");
  }
  if (options.n_centers == 0) fail(ErrorKind::InvalidParameter, "need at least one center");
  for (double s : options.sigma_grid) {
    if (!(s > 0.0)) fail(ErrorKind::InvalidParameter, "sigma grid values must be positive");
  }
  for (double l : options.lambda_grid) {
    if (!(l > 0.0)) fail(ErrorKind::InvalidParameter, "lambda grid values must be positive");
  }

  const Eigen::Index n_src = source.rows();
  const Eigen::Index n_tgt = target.rows();
  const Eigen::Index n_min = std::min(n_src, n_tgt);
  const Eigen::Index b = std::min<Eigen::Index>(static_cast<Eigen::Index>(options.n_centers), n_tgt);

  // Random subset of target points as kernel centers (partial Fisher-Yates).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_tgt));
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(options.seed, 0x75'4C'53'49'46ULL);
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n_tgt - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  MatrixXd centers(b, source.cols());
  for (Eigen::Index i = 0; i < b; ++i) centers.row(i) = target.row(order[static_cast<std::size_t>(i)]);

  const MatrixXd d_src = squared_distances(source, centers);
  const MatrixXd d_tgt = squared_distances(target, centers);
  const double nd = static_cast<double>(n_src);
  const double nn = static_cast<double>(n_tgt);
  // Degenerate single-point samples leave the leave-one-out criterion undefined.
  const bool loo_defined = n_src > 1 && n_tgt > 1;

  double best_score = std::numeric_limits<double>::infinity();
  double best_sigma = options.sigma_grid.front();
  double best_lambda = options.lambda_grid.front();

  if (loo_defined) {
    const double scale = (nd - 1.0) / (nd * (nn - 1.0));
    for (double sigma : options.sigma_grid) {
      const MatrixXd phi_src = gaussian_kernel(d_src, sigma);
      const MatrixXd phi_tgt = gaussian_kernel(d_tgt, sigma);
      const MatrixXd h_mat = phi_src.transpose() * phi_src / nd;
      const VectorXd h_vec = phi_tgt.colwise().mean().transpose();

      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h_mat);
      if (eig.info() != Eigen::Success) continue;
      const MatrixXd& q = eig.eigenvectors();
      const ArrayXd d = eig.eigenvalues().array().cwiseMax(0.0);

      // Samples are columns: per-sample reductions run over contiguous memory.
      const MatrixXd src_t = phi_src.topRows(n_min).transpose();
      const MatrixXd tgt_t = phi_tgt.topRows(n_min).transpose();
      // Held-out kernel rows expressed in the eigenbasis of H.
      const Eigen::ArrayXXd ps = (q.transpose() * src_t).array();
      const Eigen::ArrayXXd pt = (q.transpose() * tgt_t).array();
      const ArrayXd g = (q.transpose() * h_vec).array();
      MatrixXd z(b, n_min);
      MatrixXd loo(b, n_min);
      ArrayXd inv(b);
      ArrayXd g_inv(b);

      for (double lambda : options.lambda_grid) {
        inv = 1.0 / (d + lambda * (nd - 1.0) / nd);
        g_inv = g * inv;
        bool valid = true;
        for (Eigen::Index i = 0; i < n_min && valid; ++i) {
          const auto p_s = ps.col(i);
          const auto p_t = pt.col(i);
          const double quad = (p_s.square() * inv).sum();
          const double cross = (p_s * p_t * inv).sum();
          const double t = (p_s * g_inv).sum();
          const double denom = nd - quad;
          if (denom <= 0.0) valid = false;
          const double coef = (nn * t - cross) / denom;
          z.col(i) = (inv * (coef * p_s - p_t) + nn * g_inv).matrix();
        }
        if (!valid) continue;
        loo.noalias() = q * z;

        double sum_sq_src = 0.0;
        double sum_tgt = 0.0;
        for (Eigen::Index i = 0; i < n_min; ++i) {
          const auto theta = (scale * loo.col(i).array()).cwiseMax(0.0);
          const double r_src = (src_t.col(i).array() * theta).sum();
          sum_sq_src += r_src * r_src;
          sum_tgt += (tgt_t.col(i).array() * theta).sum();
        }
        const double score = sum_sq_src / (2.0 * static_cast<double>(n_min)) -
                             sum_tgt / static_cast<double>(n_min);
        if (std::isfinite(score) && score < best_score) {
          best_score = score;
          best_sigma = sigma;
          best_lambda = lambda;
        }
      }
    }
    if (!std::isfinite(best_score)) {
      fail(ErrorKind::Numeric, "leave-one-out criterion failed for every grid point");
    }
  }

  RatioModel model = fit_ulsif_at(source, target, centers, best_sigma, best_lambda);
  if (loo_defined) model.set_cv_score(best_score);
  return model;
}

}  // namespace dfcal
