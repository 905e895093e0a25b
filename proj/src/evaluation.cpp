#include "dfcal/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "dfcal/batch.hpp"
#include "dfcal/errors.hpp"

namespace dfcal {

ReliabilityReport reliability(std::span<const double> predictions, std::span<const int> labels,
                              std::size_t eval_bins, BinningKind kind) {
  if (eval_bins == 0) fail(ErrorKind::InvalidParameter, "evaluation bin count must be at least 1");
  const auto scheme = kind == BinningKind::FixedWidth
                          ? fixed_width_scheme(eval_bins)
                          : uniform_mass_scheme(predictions, eval_bins);
  return reliability(predictions, labels, scheme);
}

ReliabilityReport reliability(std::span<const double> predictions, std::span<const int> labels,
                              const BinningScheme& scheme) {
  if (predictions.size() != labels.size()) {
    fail(ErrorKind::InvalidInput, "predictions and labels differ in length");
  }
  if (predictions.empty()) fail(ErrorKind::InvalidInput, "no predictions to evaluate");
  validate_labels(labels);

  const std::size_t bins = scheme.bin_count();
  std::vector<double> positives(bins, 0.0);
  std::vector<double> predicted(bins, 0.0);
  ReliabilityReport report;
  report.bins.resize(bins);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const std::size_t b = scheme.assign(predictions[i]);
    ++report.bins[b].count;
    positives[b] += labels[i];
    predicted[b] += predictions[i];
  }
  const double m = static_cast<double>(predictions.size());
  for (std::size_t b = 0; b < bins; ++b) {
    auto& bin = report.bins[b];
    bin.lower = scheme.lower(b);
    bin.upper = scheme.upper(b);
    if (bin.count == 0) continue;
    const double n = static_cast<double>(bin.count);
    bin.proportion = n / m;
    bin.fraction_positive = positives[b] / n;
    bin.mean_predicted = predicted[b] / n;
    report.ece += bin.proportion * std::abs(*bin.mean_predicted - *bin.fraction_positive);
  }
  return report;
}

double coverage_rate(std::span<const Interval> intervals, std::span<const double> truths) {
  if (intervals.size() != truths.size()) {
    fail(ErrorKind::InvalidInput, "intervals and truths differ in length");
  }
  if (intervals.empty()) fail(ErrorKind::InvalidInput, "no intervals to score");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].contains(truths[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(intervals.size());
}

std::string reliability_svg(const ReliabilityReport& report, const std::string& title) {
  constexpr double kSize = 400.0;
  constexpr double kMargin = 50.0;
  const auto x = [&](double v) { return kMargin + v * kSize; };
  const auto y = [&](double v) { return kMargin + (1.0 - v) * kSize; };

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << kSize + 2 * kMargin
      << R"(" height=")" << kSize + 2 * kMargin << R"(">)" << '\n';
  svg << R"(<rect x=")" << kMargin << R"(" y=")" << kMargin << R"(" width=")" << kSize
      << R"(" height=")" << kSize << R"(" fill="none" stroke="black"/>)" << '\n';
  svg << R"(<line x1=")" << x(0) << R"(" y1=")" << y(0) << R"(" x2=")" << x(1) << R"(" y2=")"
      << y(1) << R"(" stroke="gray" stroke-dasharray="4,4"/>)" << '\n';
  for (const auto& bin : report.bins) {
    if (!bin.mean_predicted) continue;
    const double r = 3.0 + 12.0 * std::sqrt(bin.proportion);
    svg << R"(<circle cx=")" << x(*bin.mean_predicted) << R"(" cy=")" << y(*bin.fraction_positive)
        << R"(" r=")" << r << R"(" fill="steelblue" fill-opacity="0.7"/>)" << '\n';
  }
  svg << R"(<text x=")" << x(0.5) << R"(" y=")" << kSize + 1.7 * kMargin
      << R"(" text-anchor="middle">mean predicted probability</text>)" << '\n';
  svg << R"(<text x=")" << 0.4 * kMargin << R"(" y=")" << y(0.5)
      << R"(" text-anchor="middle" transform="rotate(-90 )" << 0.4 * kMargin << ' ' << y(0.5)
      << R"lit()">fraction of positives</text>)lit" << '\n';
  svg << std::setprecision(4);
  svg << R"(<text x=")" << x(0.5) << R"(" y=")" << 0.6 * kMargin << R"(" text-anchor="middle">)";
  if (!title.empty()) svg << title << " ";
  svg << "ECE=" << report.ece << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dfcal
