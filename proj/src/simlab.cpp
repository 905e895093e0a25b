#include "dfcal/simlab.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "dfcal/batch.hpp"
#include "dfcal/covariate_shift.hpp"
#include "dfcal/errors.hpp"
#include "dfcal/evaluation.hpp"
#include "dfcal/rng.hpp"

namespace dfcal {

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_point(const SyntheticShiftConfig& cfg, std::span<const double> x) {
  if (x.size() != cfg.dim) {
    fail(ErrorKind::InvalidInput, "point has dimension " + std::to_string(x.size()) +
                                      ", config expects " + std::to_string(cfg.dim));
  }
}

double second_moment(const BetaParams& p) {
  return p.a * (p.a + 1.0) / ((p.a + p.b) * (p.a + p.b + 1.0));
}

double eta_of(double omega, double sum_sq) { return 0.5 * (1.0 + std::sin(omega * sum_sq)); }

std::vector<double> map_through_bins(const BinningScheme& scheme, std::span<const double> values,
                                     std::span<const double> scores) {
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = values[scheme.assign(scores[i])];
  return out;
}

}  // namespace

void BetaParams::validate() const {
  if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
    fail(ErrorKind::InvalidParameter, "Beta parameters must be positive and finite");
  }
}

double beta_quantile(const BetaParams& p, double u) {
  p.validate();
  if (!(u > 0.0 && u < 1.0)) fail(ErrorKind::OutOfDomain, "Beta quantile level must lie in (0, 1)");
  if (p.b == 1.0) return std::pow(u, 1.0 / p.a);
  if (p.a == 1.0) return 1.0 - std::pow(1.0 - u, 1.0 / p.b);
  return boost::math::ibeta_inv(p.a, p.b, u);
}

double beta_cdf(const BetaParams& p, double x) {
  p.validate();
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::OutOfDomain, "Beta CDF argument must lie in [0, 1]");
  if (p.b == 1.0) return std::pow(x, p.a);
  if (p.a == 1.0) return 1.0 - std::pow(1.0 - x, p.b);
  return boost::math::ibeta(p.a, p.b, x);
}

void SyntheticShiftConfig::validate() const {
  if (dim == 0) fail(ErrorKind::InvalidParameter, "dimension must be at least 1");
  source.validate();
  target.validate();
  if (!std::isfinite(omega)) fail(ErrorKind::InvalidParameter, "omega must be finite");
}

SyntheticShiftConfig reference_shift_config(std::uint64_t seed) {
  SyntheticShiftConfig cfg;
  cfg.seed = seed;
  return cfg;
}

double label_probability(const SyntheticShiftConfig& cfg, std::span<const double> x) {
  check_point(cfg, x);
  double sum_sq = 0.0;
  for (double v : x) sum_sq += v * v;
  return eta_of(cfg.omega, sum_sq);
}

double true_ratio(const SyntheticShiftConfig& cfg, std::span<const double> x) {
  check_point(cfg, x);
  const auto& s = cfg.source;
  const auto& t = cfg.target;
  const double log_norm = log_beta(s.a, s.b) - log_beta(t.a, t.b);
  double ratio = 1.0;
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::OutOfDomain, "coordinate outside [0, 1]");
    ratio *= std::exp(log_norm) * std::pow(v, t.a - s.a) * std::pow(1.0 - v, t.b - s.b);
  }
  return ratio;
}

Eigen::VectorXd true_ratio(const SyntheticShiftConfig& cfg, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
    out[i] = true_ratio(cfg, row);
  }
  return out;
}

LabeledSample sample_domain(const SyntheticShiftConfig& cfg, const BetaParams& params,
                            std::size_t n, CounterRng& rng) {
  cfg.validate();
  params.validate();
  LabeledSample out;
  out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.dim));
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < cfg.dim; ++j) {
      const double v = beta_quantile(params, rng.uniform_open());
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      sum_sq += v * v;
    }
    out.y[i] = rng.bernoulli(eta_of(cfg.omega, sum_sq)) ? 1 : 0;
  }
  return out;
}

ShiftData gen_shift_data(const SyntheticShiftConfig& cfg, std::size_t n_source,
                         std::size_t n_target, std::uint64_t stream) {
  if (n_source == 0 || n_target == 0) fail(ErrorKind::InvalidParameter, "sample sizes must be at least 1");
  CounterRng rng(cfg.seed, stream);
  ShiftData data;
  data.source = sample_domain(cfg, cfg.source, n_source, rng);
  data.target = sample_domain(cfg, cfg.target, n_target, rng);
  return data;
}

const char* to_string(Scorer s) {
  return s == Scorer::SquaredProbability ? "squared" : "partial";
}

Scorer scorer_from_string(const std::string& name) {
  if (name == "squared") return Scorer::SquaredProbability;
  if (name == "partial") return Scorer::PartialFeature;
  fail(ErrorKind::InvalidParameter, "unknown scorer '" + name + "' (expected squared or partial)");
}

double score(const SyntheticShiftConfig& cfg, Scorer scorer, std::span<const double> x) {
  check_point(cfg, x);
  if (scorer == Scorer::SquaredProbability) {
    const double p = label_probability(cfg, x);
    return p * p;
  }
  if (cfg.dim < 2) fail(ErrorKind::InvalidParameter, "partial-feature scorer needs dim >= 2");
  double sum_sq = second_moment(cfg.source);
  for (std::size_t j = 0; j + 1 < x.size(); ++j) sum_sq += x[j] * x[j];
  const double p = eta_of(cfg.omega, sum_sq);
  return p * p;
}

std::vector<double> scores(const SyntheticShiftConfig& cfg, Scorer scorer, const Eigen::MatrixXd& x) {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
    out[static_cast<std::size_t>(i)] = score(cfg, scorer, row);
  }
  return out;
}

BinMomentOracle::BinMomentOracle(const SyntheticShiftConfig& cfg, const BetaParams& domain,
                                 Scorer scorer, std::size_t cells)
    : cells_(cells) {
  cfg.validate();
  domain.validate();
  if (cells_ < 2) fail(ErrorKind::InvalidParameter, "need at least 2 integration cells");
  const bool partial = scorer == Scorer::PartialFeature;
  if (partial && cfg.dim < 2) fail(ErrorKind::InvalidParameter, "partial-feature scorer needs dim >= 2");
  const std::size_t visible = partial ? cfg.dim - 1 : cfg.dim;
  const double m = static_cast<double>(cells_);

  // Mass of x^2 in [j/m, (j+1)/m).
  std::vector<double> cell(cells_);
  double prev = 0.0;
  for (std::size_t j = 0; j < cells_; ++j) {
    const double next = beta_cdf(domain, std::sqrt(static_cast<double>(j + 1) / m));
    cell[j] = next - prev;
    prev = next;
  }

  masses_ = cell;
  for (std::size_t k = 1; k < visible; ++k) {
    std::vector<double> conv(masses_.size() + cells_ - 1, 0.0);
    for (std::size_t i = 0; i < masses_.size(); ++i) {
      const double mi = masses_[i];
      if (mi == 0.0) continue;
      for (std::size_t j = 0; j < cells_; ++j) conv[i + j] += mi * cell[j];
    }
    masses_ = std::move(conv);
  }

  // E[sin(w t)] and E[cos(w t)] of the hidden coordinate's square.
  double hidden_sin = 0.0;
  double hidden_cos = 0.0;
  if (partial) {
    for (std::size_t j = 0; j < cells_; ++j) {
      const double t = (static_cast<double>(j) + 0.5) / m;
      hidden_sin += cell[j] * std::sin(cfg.omega * t);
      hidden_cos += cell[j] * std::cos(cfg.omega * t);
    }
  }
  const double src_second = second_moment(cfg.source);

  scores_.resize(masses_.size());
  eta_.resize(masses_.size());
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double v = (static_cast<double>(j) + 0.5 * static_cast<double>(visible)) / m;
    if (partial) {
      const double p = eta_of(cfg.omega, v + src_second);
      scores_[j] = p * p;
      eta_[j] = 0.5 * (1.0 + std::sin(cfg.omega * v) * hidden_cos +
                       std::cos(cfg.omega * v) * hidden_sin);
    } else {
      eta_[j] = eta_of(cfg.omega, v);
      scores_[j] = eta_[j] * eta_[j];
    }
  }
}

std::vector<BinMoment> BinMomentOracle::moments(const BinningScheme& scheme) const {
  std::vector<BinMoment> out(scheme.bin_count());
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    auto& bin = out[scheme.assign(scores_[j])];
    bin.mass += masses_[j];
    bin.mean += masses_[j] * eta_[j];
  }
  for (auto& bin : out) {
    bin.mean = bin.mass > 0.0 ? bin.mean / bin.mass : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

AdversaryData gen_adversary(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) fail(ErrorKind::InvalidParameter, "sample size must be at least 1");
  CounterRng rng(seed, stream);
  AdversaryData out;
  out.scores.resize(n);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.scores[i] = rng.uniform();
    out.labels[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  return out;
}

double PlattModel::operator()(double s) const { return logistic(-(slope * s + intercept)); }

double platt_nll(const PlattModel& m, std::span<const double> scores, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = m.slope * scores[i] + m.intercept;
    total += labels[i] != 0 ? softplus(z) : softplus(-z);
  }
  return total / static_cast<double>(scores.size());
}

PlattModel platt_fit(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::InvalidInput, "scores and labels differ in length");
  if (scores.empty()) fail(ErrorKind::InvalidInput, "no points to fit");
  validate_labels(labels);
  double max_neg = -std::numeric_limits<double>::infinity();
  double min_pos = std::numeric_limits<double>::infinity();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) fail(ErrorKind::InvalidInput, "scores must be finite");
    if (labels[i] != 0) {
      ++positives;
      min_pos = std::min(min_pos, scores[i]);
    } else {
      max_neg = std::max(max_neg, scores[i]);
    }
  }
  if (positives == 0 || positives == scores.size()) {
    fail(ErrorKind::DegenerateBin, "Platt scaling needs both classes in the labels");
  }

  PlattModel model;
  if (max_neg < min_pos) {
    // Separable in the increasing direction: the likelihood keeps improving as
    // the slope steepens, so stop at the cap with the cut at the gap midpoint.
    model.slope = -kPlattMaxSlope;
    model.intercept = kPlattMaxSlope * 0.5 * (max_neg + min_pos);
    model.at_boundary = true;
    return model;
  }

  const double n = static_cast<double>(scores.size());
  const double n1 = static_cast<double>(positives);
  model.slope = -1.0;
  model.intercept = std::log((n - n1) / n1) + 0.5;
  const double lo = -kPlattMaxSlope;
  const double hi = -kPlattMinSlope;

  double nll = platt_nll(model, scores, labels);
  for (int it = 0; it <= 100; ++it) {
    double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double s = scores[i];
      const double p = model(s);
      const double r = static_cast<double>(labels[i]) - p;
      const double v = p * (1.0 - p);
      ga += r * s;
      gb += r;
      haa += v * s * s;
      hab += v * s;
      hbb += v;
    }
    ga /= n; gb /= n; haa /= n; hab /= n; hbb /= n;

    const bool pinned = (model.slope <= lo && ga > 0.0) || (model.slope >= hi && ga < 0.0);
    const double proj_grad = std::max(std::abs(gb), pinned ? 0.0 : std::abs(ga));
    model.iterations = it;
    if (proj_grad < 1e-8) {
      model.at_boundary = pinned;
      return model;
    }
    if (it == 100) break;

    double da = 0.0, db = 0.0;
    if (pinned) {
      db = -gb / hbb;
    } else {
      const double ridge = 1e-12 * (haa + hbb);
      const double det = (haa + ridge) * (hbb + ridge) - hab * hab;
      da = -((hbb + ridge) * ga - hab * gb) / det;
      db = -((haa + ridge) * gb - hab * ga) / det;
    }

    // Near the optimum the predicted decrease is below the rounding error of
    // the objective, so the line search cannot tell steps apart: take the
    // full Newton step.
    const double predicted = -(std::clamp(model.slope + da, lo, hi) - model.slope) * ga - db * gb;
    if (predicted < 1e-13) {
      model.slope = std::clamp(model.slope + da, lo, hi);
      model.intercept += db;
      nll = platt_nll(model, scores, labels);
      continue;
    }

    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half, step *= 0.5) {
      PlattModel trial = model;
      trial.slope = std::clamp(model.slope + step * da, lo, hi);
      trial.intercept = model.intercept + step * db;
      const double trial_nll = platt_nll(trial, scores, labels);
      const double decrease = (trial.slope - model.slope) * ga + (trial.intercept - model.intercept) * gb;
      if (trial_nll <= nll + 1e-4 * decrease) {
        model.slope = trial.slope;
        model.intercept = trial.intercept;
        nll = trial_nll;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Objective is flat to machine precision along the Newton direction.
      if (proj_grad < 1e-6) {
        model.at_boundary = pinned;
        return model;
      }
      std::ostringstream msg;
      msg << "Platt line search stalled at iteration " << it << " (gradient " << proj_grad << ")";
      fail(ErrorKind::Numeric, msg.str());
    }
  }
  fail(ErrorKind::Numeric, "Platt scaling did not converge within 100 iterations");
}

ShiftTrialResult run_shift_trial(const SyntheticShiftConfig& cfg, const ShiftTrialOptions& opt,
                                 const BinMomentOracle& target_oracle,
                                 const BinMomentOracle& source_oracle, std::uint64_t trial) {
  cfg.validate();
  const auto& sz = opt.sizes;
  CounterRng rng(cfg.seed, trial);
  const auto quant = sample_domain(cfg, cfg.source, sz.quantile, rng);
  const auto cal = sample_domain(cfg, cfg.source, sz.calibration, rng);
  const auto ratio_src = sample_domain(cfg, cfg.source, sz.ratio_source, rng);
  const auto ratio_tgt = sample_domain(cfg, cfg.target, sz.ratio_target, rng);
  const auto test = sample_domain(cfg, cfg.target, sz.test, rng);
  const auto count_src = sample_domain(cfg, cfg.source, sz.count_source, rng);
  const auto count_tgt = sample_domain(cfg, cfg.target, sz.count_target, rng);

  const auto scheme = uniform_mass_scheme(scores(cfg, opt.scorer, quant.x), opt.bins);
  const auto cal_s = scores(cfg, opt.scorer, cal.x);
  const auto test_s = scores(cfg, opt.scorer, test.x);
  const std::size_t bins = scheme.bin_count();

  ShiftTrialResult res;
  res.trial = trial;
  const auto ece = [&](const std::vector<double>& per_bin) {
    return reliability(map_through_bins(scheme, per_bin, test_s), test.y, opt.eval_bins).ece;
  };
  res.ece_uncalibrated = reliability(test_s, test.y, opt.eval_bins).ece;

  const auto model = fit(scheme, cal_s, cal.y, opt.alpha);
  std::vector<double> per_bin(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (model.stats()[b].empty()) throw EmptyBinError(b);
    per_bin[b] = model.stats()[b].mean;
  }
  res.ece_unweighted = ece(per_bin);
  res.unweighted = per_bin;

  // Oracle weights.
  const Eigen::VectorXd w = true_ratio(cfg, cal.x);
  const std::span<const double> w_span(w.data(), static_cast<std::size_t>(w.size()));
  const auto oracle_est = weighted_bin_estimates(scheme, cal_s, cal.y, w_span);
  for (std::size_t b = 0; b < bins; ++b) per_bin[b] = oracle_est[b].weighted_mean;
  res.ece_oracle = ece(per_bin);

  res.edges = scheme.edges();
  res.oracle = per_bin;

  const auto target_moments = target_oracle.moments(scheme);
  res.target_mean.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) res.target_mean[b] = target_moments[b].mean;
  const auto source_moments = source_oracle.moments(scheme);
  const WeightBounds bounds{std::min(1.0, w.minCoeff()), std::max(1.0, w.maxCoeff())};
  const auto shift_model = fit_weighted(scheme, cal_s, cal.y, w_span, opt.alpha, bounds, opt.c);
  const auto r = shift_model.radius();
  res.oracle_radius = r.radius;
  res.oracle_sample_size_ok = r.sample_size_ok;
  res.oracle_covered = true;
  for (std::size_t b = 0; b < bins; ++b) {
    if (!shift_model.bin_interval(b).contains(target_moments[b].mean)) res.oracle_covered = false;
  }

  std::vector<double> true_mass(bins);
  for (std::size_t b = 0; b < bins; ++b) true_mass[b] = source_moments[b].mass / target_moments[b].mass;
  const auto relmass = fit_relative_mass_weighted(scheme, cal_s, cal.y, w_span, true_mass,
                                                  opt.alpha, bounds.upper);
  res.relmass_covered = true;
  for (std::size_t b = 0; b < bins; ++b) {
    res.relmass_max_radius = std::max(res.relmass_max_radius, relmass[b].radius);
    if (!clipped_interval(relmass[b].clipped_mean(), relmass[b].radius)
             .contains(target_moments[b].mean)) {
      res.relmass_covered = false;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.ece_shift = res.ece_count_ratio = res.sigma = res.lambda = nan;
  res.shift.assign(bins, nan);
  res.count_ratio.assign(bins, nan);
  if (!opt.estimate_ratio) return res;

  UlsifOptions ulsif = opt.ulsif;
  ulsif.seed = splitmix64(cfg.seed ^ splitmix64(trial));
  const auto ratio = fit_ulsif(ratio_src.x, ratio_tgt.x, ulsif);
  res.sigma = ratio.sigma();
  res.lambda = ratio.lambda();
  const Eigen::VectorXd w_hat = ratio.evaluate(cal.x);
  const std::span<const double> w_hat_span(w_hat.data(), static_cast<std::size_t>(w_hat.size()));
  const auto shift_est = weighted_bin_estimates(scheme, cal_s, cal.y, w_hat_span);
  for (std::size_t b = 0; b < bins; ++b) per_bin[b] = shift_est[b].weighted_mean;
  res.ece_shift = ece(per_bin);
  res.shift = per_bin;

  const auto src_counts = bin_counts(scheme, scores(cfg, opt.scorer, count_src.x));
  const auto tgt_counts = bin_counts(scheme, scores(cfg, opt.scorer, count_tgt.x));
  const auto m_hat = count_ratio_rel_mass(src_counts, tgt_counts);
  const auto count_est = fit_relative_mass_weighted(scheme, cal_s, cal.y, w_hat_span, m_hat,
                                                    opt.alpha, std::max(1.0, w_hat.maxCoeff()));
  for (std::size_t b = 0; b < bins; ++b) per_bin[b] = count_est[b].clipped_mean();
  res.ece_count_ratio = ece(per_bin);
  res.count_ratio = per_bin;
  return res;
}

AdversaryTrialResult run_adversary_trial(const AdversaryTrialOptions& opt, std::uint64_t seed,
                                         std::uint64_t trial) {
  if (opt.n == 0 || opt.quantile == 0 || opt.test == 0) {
    fail(ErrorKind::InvalidParameter, "adversary sample sizes must be at least 1");
  }
  CounterRng rng(seed, trial);
  const auto draw = [&](std::size_t n) {
    AdversaryData d;
    d.scores.resize(n);
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      d.scores[i] = rng.uniform();
      d.labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    return d;
  };
  const auto quant = draw(opt.quantile);
  const auto cal = draw(opt.n);
  const auto test = draw(opt.test);

  AdversaryTrialResult res;
  res.trial = trial;
  const auto model = fit(uniform_mass_scheme(quant.scores, opt.bins), cal.scores, cal.labels, opt.alpha);
  res.binned_covered = true;
  for (std::size_t b = 0; b < model.scheme().bin_count(); ++b) {
    const Interval ci = model.stats()[b].empty() ? Interval{0.0, 1.0} : model.bin_interval(b);
    res.bin_intervals.push_back(ci);
    if (!ci.contains(0.5)) res.binned_covered = false;
  }

  res.platt = platt_fit(cal.scores, cal.labels);
  res.epsilon = std::pow(static_cast<double>(opt.n), -1.0 / 3.0);
  std::size_t outside = 0;
  for (double s : test.scores) {
    const double dev = std::abs(res.platt(s) - 0.5);
    res.max_deviation = std::max(res.max_deviation, dev);
    if (dev > res.epsilon) ++outside;
  }
  res.outside_fraction = static_cast<double>(outside) / static_cast<double>(opt.test);
  res.platt_failed = res.outside_fraction >= opt.fail_fraction;
  return res;
}

}  // namespace dfcal
