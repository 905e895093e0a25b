#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "dfcal/batch.hpp"
#include "dfcal/binning.hpp"
#include "dfcal/covariate_shift.hpp"
#include "dfcal/csv.hpp"
#include "dfcal/density_ratio.hpp"
#include "dfcal/errors.hpp"
#include "dfcal/evaluation.hpp"
#include "dfcal/serialize.hpp"
#include "dfcal/simlab.hpp"
#include "dfcal/streaming.hpp"
#include "dfcal/tripod.hpp"

namespace dfcal::cli {

namespace {

using dfcal::format_double;

struct Options {
  std::string in;
  std::string out;
  std::string model;
  std::string scheme;
  std::string kind = "uniform_mass";
  std::size_t bins = 10;
  double alpha = 0.1;

  // predict
  bool with_interval = false;
  bool with_set = false;

  // stream
  std::string mode = "closed";

  // shift-calibrate
  std::string ratio;
  std::string features;
  std::optional<double> lower;
  std::optional<double> upper;
  double c = 2.0;

  // dr-fit
  std::string source;
  std::string target;
  std::string sigma_grid = "0.01,100,25";
  std::string lambda_grid = "0.001,1000,100";
  std::size_t centers = 100;
  std::uint64_t seed = 0;

  // evaluate
  std::string svg;
  std::string eval_kind = "fixed_width";

  // simulate
  std::string experiment = "shift";
  std::size_t trials = 10;
  std::size_t threads = 1;
  std::string scorer = "squared";
  bool skip_ratio = false;
};

/// Writes to `path` atomically, or to `out` when no path was given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::vector<double> parse_grid(const std::string& spec, const char* name) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidParameter, std::string(name) + " must be lo,hi,count");
    }
  }
  if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2])) {
    fail(ErrorKind::InvalidParameter, std::string(name) + " must be lo,hi,count");
  }
  return log_grid(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
}

std::vector<std::string> feature_columns(const CsvTable& t, const std::string& spec) {
  std::vector<std::string> cols;
  if (!spec.empty()) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      t.column(item);
      cols.push_back(item);
    }
  } else {
    for (const auto& h : t.header) {
      if (h != "score" && h != "label" && h != "weight") cols.push_back(h);
    }
  }
  if (cols.empty()) fail(ErrorKind::InvalidInput, "no feature columns found");
  return cols;
}

Eigen::MatrixXd feature_matrix(const CsvTable& t, const std::vector<std::string>& cols) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t c = t.column(cols[k]);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = t.number(r, c);
    }
  }
  return x;
}

void require_rows(const CsvTable& t, const std::string& what) {
  if (t.rows.empty()) fail(ErrorKind::InvalidInput, what + " has no data rows");
}

BinningScheme scheme_for(const Options& o, std::span<const double> scores) {
  if (!o.scheme.empty()) return scheme_from_json(read_file(o.scheme));
  if (o.bins == 0) fail(ErrorKind::InvalidParameter, "--bins must be at least 1");
  return binning_kind_from_string(o.kind) == BinningKind::FixedWidth
             ? fixed_width_scheme(o.bins)
             : uniform_mass_scheme(scores, o.bins);
}

int cmd_bin_fit(const Options& o, std::ostream& out) {
  const auto t = read_csv(o.in);
  require_rows(t, o.in);
  const auto s = t.numbers("score");
  emit(o.out, to_json(scheme_for(o, s)), out);
  return 0;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  validate_alpha(o.alpha);
  const auto t = read_csv(o.in);
  require_rows(t, o.in);
  const auto s = t.numbers("score");
  const auto y = t.labels("label");
  emit(o.out, to_json(fit(scheme_for(o, s), s, y, o.alpha)), out);
  return 0;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const std::string text = read_file(o.model);
  const std::string type = model_type(text);
  std::optional<CalibratorModel> hist;
  std::optional<ShiftModel> shift;
  if (type == "histogram") {
    hist = calibrator_from_json(text);
  } else if (type == "shift") {
    shift = shift_model_from_json(text);
  } else {
    fail(ErrorKind::InvalidInput, "schema mismatch: cannot predict with a '" + type + "' model");
  }
  const auto& scheme = hist ? hist->scheme() : shift->scheme();
  const auto t = read_csv(o.in);
  const auto s = t.numbers("score");

  std::ostringstream csv;
  csv << "score,p";
  if (o.with_interval) csv << ",lo,hi";
  if (o.with_set) csv << ",set";
  csv << "\n";
  for (double v : s) {
    const std::size_t b = scheme.assign(v);
    const double p = hist ? hist->predict(v) : shift->predict(v);
    const Interval ci = hist ? hist->bin_interval(b) : shift->bin_interval(b);
    csv << format_double(v) << "," << format_double(p);
    if (o.with_interval) csv << "," << format_double(ci.lower) << "," << format_double(ci.upper);
    if (o.with_set) csv << "," << ci_to_prediction_set(ci).to_string();
    csv << "\n";
  }
  emit(o.out, csv.str(), out);
  return 0;
}

int cmd_stream(const Options& o, std::ostream& out) {
  validate_alpha(o.alpha);
  const std::string text = o.in.empty() || o.in == "-"
                               ? std::string(std::istreambuf_iterator<char>(std::cin), {})
                               : read_file(o.in);
  const auto t = parse_csv(text, o.in.empty() ? "stdin" : o.in);
  BinningScheme scheme = o.scheme.empty() ? fixed_width_scheme(o.bins) : scheme_from_json(read_file(o.scheme));
  StreamCalibrator cal(std::move(scheme), o.alpha, stream_mode_from_string(o.mode));
  const std::size_t sc = t.column("score");
  const std::size_t lc = t.column("label");

  std::ostringstream csv;
  csv << "n,bin,mean,lo,hi\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t b = cal.observe(t.number(r, sc), t.label(r, lc));
    const Interval ci = cal.interval(b);
    csv << cal.observations() << "," << b << "," << format_double(cal.state(b).mean) << ","
        << format_double(ci.lower) << "," << format_double(ci.upper) << "\n";
  }
  emit(o.out, csv.str(), out);
  return 0;
}

int cmd_shift_calibrate(const Options& o, std::ostream& out) {
  validate_alpha(o.alpha);
  const auto t = read_csv(o.in);
  require_rows(t, o.in);
  const auto s = t.numbers("score");
  const auto y = t.labels("label");
  std::vector<double> w;
  if (!o.ratio.empty()) {
    const auto ratio = ratio_model_from_json(read_file(o.ratio));
    const auto cols = feature_columns(t, o.features);
    const Eigen::VectorXd v = ratio.evaluate(feature_matrix(t, cols));
    w.assign(v.data(), v.data() + v.size());
  } else if (t.has_column("weight")) {
    w = t.numbers("weight");
  } else {
    fail(ErrorKind::InvalidInput, "need a 'weight' column or --ratio model");
  }
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  const WeightBounds bounds{o.lower.value_or(std::min(1.0, *lo)), o.upper.value_or(std::max(1.0, *hi))};
  emit(o.out, to_json(fit_weighted(scheme_for(o, s), s, y, w, o.alpha, bounds, o.c)), out);
  return 0;
}

int cmd_dr_fit(const Options& o, std::ostream& out) {
  const auto src = read_csv(o.source);
  const auto tgt = read_csv(o.target);
  require_rows(src, o.source);
  require_rows(tgt, o.target);
  const auto cols = feature_columns(src, o.features);
  UlsifOptions opt;
  opt.sigma_grid = parse_grid(o.sigma_grid, "--sigma-grid");
  opt.lambda_grid = parse_grid(o.lambda_grid, "--lambda-grid");
  opt.n_centers = o.centers;
  opt.seed = o.seed;
  auto model = fit_ulsif(feature_matrix(src, cols), feature_matrix(tgt, cols), opt);
  if (o.lower || o.upper) {
    model = model.clipped(o.lower.value_or(0.0), o.upper.value_or(std::numeric_limits<double>::infinity()));
  }
  emit(o.out, to_json(model), out);
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto t = read_csv(o.in);
  require_rows(t, o.in);
  const auto p = t.numbers(t.has_column("p") ? "p" : "score");
  const auto y = t.labels("label");
  const auto report = reliability(p, y, o.bins, binning_kind_from_string(o.eval_kind));

  std::ostringstream csv;
  csv << "bin,lo,hi,count,fp,mp\n";
  for (std::size_t b = 0; b < report.bins.size(); ++b) {
    const auto& r = report.bins[b];
    csv << b << "," << format_double(r.lower) << "," << format_double(r.upper) << "," << r.count << ","
        << (r.fraction_positive ? format_double(*r.fraction_positive) : "") << ","
        << (r.mean_predicted ? format_double(*r.mean_predicted) : "") << "\n";
  }
  const std::string summary = "ece=" + format_double(report.ece) + "\n";
  if (o.out.empty()) {
    out << csv.str() << summary;
  } else {
    write_file_atomic(o.out, csv.str());
    out << summary;
  }
  if (!o.svg.empty()) write_file_atomic(o.svg, reliability_svg(report));
  return 0;
}

/// Runs `count` independent trials on up to `threads` workers. Results land
/// at their trial index, so the output order never depends on scheduling.
template <typename Result, typename Fn>
std::vector<Result> run_trials(std::size_t count, std::size_t threads, Fn fn) {
  std::vector<std::optional<Result>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < std::min(threads, count); ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string trial_name(std::size_t i) {
  std::ostringstream s;
  s << "trial_";
  s.width(4);
  s.fill('0');
  s << i << ".csv";
  return s.str();
}

int cmd_simulate(const Options& o, std::ostream& out) {
  namespace fs = std::filesystem;
  if (o.trials == 0) fail(ErrorKind::InvalidParameter, "--trials must be at least 1");
  if (o.threads == 0) fail(ErrorKind::InvalidParameter, "--threads must be at least 1");
  if (o.out.empty()) fail(ErrorKind::InvalidParameter, "--out directory is required");
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec || !fs::is_directory(o.out)) fail(ErrorKind::InvalidInput, "cannot create directory '" + o.out + "'");
  const fs::path dir(o.out);

  if (o.experiment == "shift") {
    validate_alpha(o.alpha);
    const auto cfg = reference_shift_config(o.seed);
    ShiftTrialOptions opt;
    opt.bins = o.bins;
    opt.alpha = o.alpha;
    opt.c = o.c;
    opt.scorer = scorer_from_string(o.scorer);
    opt.estimate_ratio = !o.skip_ratio;
    const BinMomentOracle target(cfg, cfg.target, opt.scorer);
    const BinMomentOracle source(cfg, cfg.source, opt.scorer);
    const auto results = run_trials<ShiftTrialResult>(o.trials, o.threads, [&](std::size_t i) {
      return run_shift_trial(cfg, opt, target, source, i);
    });

    std::ostringstream summary;
    summary << "trial,ece_uncalibrated,ece_unweighted,ece_shift,ece_oracle,ece_count_ratio,"
               "oracle_radius,oracle_covered,relmass_covered,sigma,lambda\n";
    std::vector<double> unw, shf, orc;
    std::size_t covered = 0, relmass = 0;
    for (const auto& r : results) {
      std::ostringstream csv;
      csv << "bin,lo,hi,target_mean,unweighted,shift,oracle,count_ratio\n";
      for (std::size_t b = 0; b + 1 < r.edges.size(); ++b) {
        csv << b << "," << format_double(r.edges[b]) << "," << format_double(r.edges[b + 1]) << ","
            << format_double(r.target_mean[b]) << "," << format_double(r.unweighted[b]) << ","
            << format_double(r.shift[b]) << "," << format_double(r.oracle[b]) << ","
            << format_double(r.count_ratio[b]) << "\n";
      }
      write_file_atomic((dir / trial_name(r.trial)).string(), csv.str());
      summary << r.trial << "," << format_double(r.ece_uncalibrated) << "," << format_double(r.ece_unweighted)
              << "," << format_double(r.ece_shift) << "," << format_double(r.ece_oracle) << ","
              << format_double(r.ece_count_ratio) << "," << format_double(r.oracle_radius) << ","
              << r.oracle_covered << "," << r.relmass_covered << "," << format_double(r.sigma) << ","
              << format_double(r.lambda) << "\n";
      unw.push_back(r.ece_unweighted);
      shf.push_back(r.ece_shift);
      orc.push_back(r.ece_oracle);
      covered += r.oracle_covered;
      relmass += r.relmass_covered;
    }
    write_file_atomic((dir / "summary.csv").string(), summary.str());
    const double n = static_cast<double>(results.size());
    out << "median_ece_unweighted=" << format_double(median(unw)) << "\n"
        << "median_ece_shift=" << format_double(median(shf)) << "\n"
        << "median_ece_oracle=" << format_double(median(orc)) << "\n"
        << "oracle_coverage=" << format_double(static_cast<double>(covered) / n) << "\n"
        << "relmass_coverage=" << format_double(static_cast<double>(relmass) / n) << "\n";
    return 0;
  }

  if (o.experiment == "adversary") {
    AdversaryTrialOptions opt;
    opt.bins = o.bins;
    opt.alpha = o.alpha;
    validate_alpha(opt.alpha);
    const auto results = run_trials<AdversaryTrialResult>(o.trials, o.threads, [&](std::size_t i) {
      return run_adversary_trial(opt, o.seed, i);
    });
    std::ostringstream summary;
    summary << "trial,binned_covered,platt_slope,platt_intercept,platt_at_boundary,epsilon,"
               "outside_fraction,platt_failed\n";
    std::size_t covered = 0, failed = 0;
    for (const auto& r : results) {
      std::ostringstream csv;
      csv << "bin,lo,hi,covers_half\n";
      for (std::size_t b = 0; b < r.bin_intervals.size(); ++b) {
        const auto& ci = r.bin_intervals[b];
        csv << b << "," << format_double(ci.lower) << "," << format_double(ci.upper) << ","
            << ci.contains(0.5) << "\n";
      }
      write_file_atomic((dir / trial_name(r.trial)).string(), csv.str());
      summary << r.trial << "," << r.binned_covered << "," << format_double(r.platt.slope) << ","
              << format_double(r.platt.intercept) << "," << r.platt.at_boundary << ","
              << format_double(r.epsilon) << "," << format_double(r.outside_fraction) << ","
              << r.platt_failed << "\n";
      covered += r.binned_covered;
      failed += r.platt_failed;
    }
    write_file_atomic((dir / "summary.csv").string(), summary.str());
    const double n = static_cast<double>(results.size());
    out << "binned_coverage=" << format_double(static_cast<double>(covered) / n) << "\n"
        << "platt_failure_rate=" << format_double(static_cast<double>(failed) / n) << "\n";
    return 0;
  }
  fail(ErrorKind::InvalidParameter, "unknown experiment '" + o.experiment + "' (expected shift or adversary)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Distribution-free calibration of binary classifiers"};
  app.name("dfcal");
  app.require_subcommand(1);

  const auto add_alpha = [&](CLI::App* c) {
    c->add_option("--alpha", o.alpha, "Miscoverage level in (0,1)")->capture_default_str();
  };
  const auto add_binning = [&](CLI::App* c) {
    c->add_option("--bins,-B", o.bins, "Number of bins")->capture_default_str();
    c->add_option("--kind", o.kind, "uniform_mass or fixed_width")->capture_default_str();
    c->add_option("--scheme", o.scheme, "Binning scheme JSON from bin-fit (overrides --bins/--kind)");
  };

  auto* bin_fit = app.add_subcommand(
      "bin-fit", "Fit bin edges on held-out scores (CSV column 'score'). Uniform-mass edges sit at "
                 "empirical quantiles");
  bin_fit->add_option("--in", o.in, "Scores CSV")->required();
  bin_fit->add_option("--out", o.out, "Scheme JSON (stdout if omitted)");
  bin_fit->add_option("--bins,-B", o.bins, "Number of bins")->capture_default_str();
  bin_fit->add_option("--kind", o.kind, "uniform_mass or fixed_width")->capture_default_str();

  auto* calibrate = app.add_subcommand(
      "calibrate", "Histogram binning with empirical-Bernstein radii simultaneous over bins. "
                   "Input CSV columns 'score,label'");
  calibrate->add_option("--in", o.in, "Calibration CSV")->required();
  calibrate->add_option("--out", o.out, "Model JSON (stdout if omitted)");
  add_binning(calibrate);
  add_alpha(calibrate);

  auto* predict = app.add_subcommand("predict", "Apply a histogram or shift model to a 'score' column");
  predict->add_option("--model", o.model, "Model JSON")->required();
  predict->add_option("--in", o.in, "Scores CSV")->required();
  predict->add_option("--out", o.out, "Output CSV (stdout if omitted)");
  predict->add_flag("--with-interval", o.with_interval, "Add the bin's confidence interval lo,hi");
  predict->add_flag("--with-set", o.with_set, "Add the prediction set obtained from the interval");

  auto* stream = app.add_subcommand(
      "stream", "Time-uniform per-bin intervals updated one labelled score at a time. Reads "
                "'score,label' rows and writes one interval per row");
  stream->add_option("--in", o.in, "Input CSV (stdin if omitted or '-')");
  stream->add_option("--out", o.out, "Output CSV (stdout if omitted)");
  stream->add_option("--bins,-B", o.bins, "Number of fixed-width bins")->capture_default_str();
  stream->add_option("--scheme", o.scheme, "Binning scheme JSON (overrides --bins)");
  stream->add_option("--mode", o.mode, "closed (closed-form boundary) or stitched")->capture_default_str();
  add_alpha(stream);

  auto* shift = app.add_subcommand(
      "shift-calibrate", "Importance-weighted binning for a covariate-shifted target. Weights come "
                         "from a 'weight' column or from --ratio applied to feature columns");
  shift->add_option("--in", o.in, "Labelled source CSV")->required();
  shift->add_option("--out", o.out, "Model JSON (stdout if omitted)");
  shift->add_option("--ratio", o.ratio, "Density-ratio JSON from dr-fit");
  shift->add_option("--features", o.features, "Comma-separated feature columns (default: all but score,label,weight)");
  shift->add_option("--lower,-L", o.lower, "Lower weight bound L (default: min(1, smallest weight))");
  shift->add_option("--upper,-U", o.upper, "Upper weight bound U (default: max(1, largest weight))");
  shift->add_option("--c", o.c, "Constant in the radius")->capture_default_str();
  add_binning(shift);
  add_alpha(shift);

  auto* dr = app.add_subcommand(
      "dr-fit", "Estimate dP_target/dP_source by uLSIF with leave-one-out selection of sigma and lambda");
  dr->add_option("--source", o.source, "Unlabelled source features CSV")->required();
  dr->add_option("--target", o.target, "Unlabelled target features CSV")->required();
  dr->add_option("--out", o.out, "Model JSON (stdout if omitted)");
  dr->add_option("--features", o.features, "Comma-separated feature columns (default: all but score,label,weight)");
  dr->add_option("--sigma-grid", o.sigma_grid, "Log-spaced kernel widths lo,hi,count")->capture_default_str();
  dr->add_option("--lambda-grid", o.lambda_grid, "Log-spaced ridge values lo,hi,count")->capture_default_str();
  dr->add_option("--centers", o.centers, "Number of kernel centers")->capture_default_str();
  dr->add_option("--seed", o.seed, "Seed for the choice of centers")->capture_default_str();
  dr->add_option("--clip-lower", o.lower, "Clip estimated ratios from below");
  dr->add_option("--clip-upper", o.upper, "Clip estimated ratios from above");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Reliability table and l1-ECE of predictions. Input CSV columns 'p,label' "
                  "('score' accepted for 'p')");
  evaluate->add_option("--preds,--in", o.in, "Predictions CSV")->required();
  evaluate->add_option("--bins,-B", o.bins, "Number of evaluation bins")->capture_default_str();
  evaluate->add_option("--kind", o.eval_kind, "fixed_width or uniform_mass")->capture_default_str();
  evaluate->add_option("--out", o.out, "Table CSV (stdout if omitted)");
  evaluate->add_option("--svg", o.svg, "Also write a reliability diagram");

  auto* simulate = app.add_subcommand(
      "simulate", "Seeded synthetic experiments: 'shift' (product-Beta covariate shift) or "
                  "'adversary' (labels independent of scores)");
  simulate->add_option("--experiment", o.experiment, "shift or adversary")->capture_default_str();
  simulate->add_option("--trials", o.trials, "Number of trials")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Master seed; trial i uses stream i")->capture_default_str();
  simulate->add_option("--out", o.out, "Output directory")->required();
  simulate->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  simulate->add_option("--bins,-B", o.bins, "Number of bins")->capture_default_str();
  simulate->add_option("--scorer", o.scorer, "Base scorer for 'shift': squared or partial")->capture_default_str();
  simulate->add_option("--c", o.c, "Constant in the shift radius")->capture_default_str();
  simulate->add_flag("--skip-ratio", o.skip_ratio, "Skip density-ratio estimation in 'shift'");
  add_alpha(simulate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (bin_fit->parsed()) return cmd_bin_fit(o, out);
    if (calibrate->parsed()) return cmd_calibrate(o, out);
    if (predict->parsed()) return cmd_predict(o, out);
    if (stream->parsed()) return cmd_stream(o, out);
    if (shift->parsed()) return cmd_shift_calibrate(o, out);
    if (dr->parsed()) return cmd_dr_fit(o, out);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_numeric() ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace dfcal::cli
