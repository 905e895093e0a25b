#include "dfcal/serialize.hpp"

#include <cmath>
#include <json.hpp>

#include "dfcal/errors.hpp"

namespace dfcal {

namespace {

using nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    fail(ErrorKind::InvalidInput, std::string("schema mismatch: missing field '") + name + "'");
  }
  return j.at(name);
}

double number(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) {
    fail(ErrorKind::InvalidInput, std::string("schema mismatch: field '") + name + "' is not a number");
  }
  return v.get<double>();
}

std::size_t count(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number_unsigned()) {
    fail(ErrorKind::InvalidInput,
         std::string("schema mismatch: field '") + name + "' is not a nonnegative integer");
  }
  return v.get<std::size_t>();
}

const json& array(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_array()) {
    fail(ErrorKind::InvalidInput, std::string("schema mismatch: field '") + name + "' is not an array");
  }
  return v;
}

json expect_type(const std::string& text, const char* type) {
  json j = parse(text);
  const auto& t = field(j, "type");
  if (!t.is_string() || t.get<std::string>() != type) {
    fail(ErrorKind::InvalidInput, std::string("schema mismatch: expected a '") + type +
                                      "' model, found '" + (t.is_string() ? t.get<std::string>() : t.dump()) +
                                      "'");
  }
  return j;
}

json optional_number(double v, bool present) { return present ? json(v) : json(nullptr); }

json scheme_json(const BinningScheme& scheme) {
  return json{{"kind", to_string(scheme.kind())},
              {"bin_count", scheme.bin_count()},
              {"edges", scheme.edges()}};
}

BinningScheme scheme_of(const json& j) {
  const auto& kind = field(j, "kind");
  if (!kind.is_string()) fail(ErrorKind::InvalidInput, "schema mismatch: field 'kind' is not a string");
  std::vector<double> edges;
  for (const auto& e : array(j, "edges")) {
    if (!e.is_number()) fail(ErrorKind::InvalidInput, "schema mismatch: non-numeric edge");
    edges.push_back(e.get<double>());
  }
  if (edges.size() < 2) fail(ErrorKind::InvalidInput, "schema mismatch: fewer than two edges");
  BinningScheme scheme(std::move(edges), binning_kind_from_string(kind.get<std::string>()));
  if (count(j, "bin_count") != scheme.bin_count()) {
    fail(ErrorKind::InvalidInput, "schema mismatch: bin_count disagrees with edges");
  }
  return scheme;
}

}  // namespace

std::string to_json(const BinningScheme& scheme) {
  json j = scheme_json(scheme);
  j["type"] = "binning";
  return dump(j);
}

std::string to_json(const CalibratorModel& model) {
  json bins = json::array();
  for (std::size_t b = 0; b < model.stats().size(); ++b) {
    const auto& s = model.stats()[b];
    const bool present = !s.empty();
    bins.push_back({{"count", s.count},
                    {"mean", optional_number(s.mean, present)},
                    {"variance", optional_number(s.variance, present)},
                    {"radius", optional_number(model.radii()[b], present)}});
  }
  json j{{"type", "histogram"},
         {"scheme", scheme_json(model.scheme())},
         {"alpha", model.alpha()},
         {"epsilon_star", model.epsilon_star()},
         {"epsilon_min_count", model.epsilon_at_min_count()},
         {"bins", bins}};
  return dump(j);
}

std::string to_json(const ShiftModel& model) {
  json bins = json::array();
  for (const auto& e : model.bins()) {
    const bool present = !e.empty();
    bins.push_back({{"count", e.count},
                    {"weight_sum", e.weight_sum},
                    {"mean", optional_number(e.weighted_mean, present)},
                    {"weight_mean", optional_number(e.weight_mean, present)},
                    {"rel_mass", optional_number(e.rel_mass, present)}});
  }
  const auto r = model.radius();
  json j{{"type", "shift"},
         {"estimator", "self_normalized"},
         {"scheme", scheme_json(model.scheme())},
         {"alpha", model.alpha()},
         {"L", model.bounds().lower},
         {"U", model.bounds().upper},
         {"c", model.c()},
         {"n", model.total_count()},
         {"radius", r.radius},
         {"sample_size_ok", r.sample_size_ok},
         {"bins", bins}};
  return dump(j);
}

std::string to_json(const RatioModel& model) {
  json centers = json::array();
  for (Eigen::Index i = 0; i < model.centers().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < model.centers().cols(); ++k) row.push_back(model.centers()(i, k));
    centers.push_back(row);
  }
  json theta = json::array();
  for (Eigen::Index i = 0; i < model.theta().size(); ++i) theta.push_back(model.theta()[i]);
  const bool finite_upper = std::isfinite(model.clip_upper());
  json j{{"type", "density_ratio"},
         {"dim", model.dim()},
         {"sigma", model.sigma()},
         {"lambda", model.lambda()},
         {"centers", centers},
         {"theta", theta},
         {"clip", {{"lower", model.clip_lower()},
                   {"upper", optional_number(model.clip_upper(), finite_upper)}}},
         {"cv_score", optional_number(model.cv_score(), !std::isnan(model.cv_score()))}};
  return dump(j);
}

std::string model_type(const std::string& text) {
  const json j = parse(text);
  const auto& t = field(j, "type");
  if (!t.is_string()) fail(ErrorKind::InvalidInput, "schema mismatch: field 'type' is not a string");
  return t.get<std::string>();
}

BinningScheme scheme_from_json(const std::string& text) {
  return scheme_of(expect_type(text, "binning"));
}

CalibratorModel calibrator_from_json(const std::string& text) {
  const json j = expect_type(text, "histogram");
  auto scheme = scheme_of(field(j, "scheme"));
  std::vector<BinStats> stats;
  for (const auto& b : array(j, "bins")) {
    BinStats s;
    s.count = count(b, "count");
    if (s.count > 0) {
      s.mean = number(b, "mean");
      s.variance = number(b, "variance");
    }
    stats.push_back(s);
  }
  if (stats.size() != scheme.bin_count()) {
    fail(ErrorKind::InvalidInput, "schema mismatch: bin entries disagree with the scheme");
  }
  return CalibratorModel(std::move(scheme), std::move(stats), number(j, "alpha"));
}

ShiftModel shift_model_from_json(const std::string& text) {
  const json j = expect_type(text, "shift");
  auto scheme = scheme_of(field(j, "scheme"));
  std::vector<ShiftBinEstimate> bins;
  for (const auto& b : array(j, "bins")) {
    ShiftBinEstimate e;
    e.count = count(b, "count");
    e.weight_sum = number(b, "weight_sum");
    if (e.count > 0) {
      e.weighted_mean = number(b, "mean");
      e.weight_mean = number(b, "weight_mean");
      e.rel_mass = number(b, "rel_mass");
    }
    bins.push_back(e);
  }
  const WeightBounds bounds{number(j, "L"), number(j, "U")};
  return ShiftModel(std::move(scheme), std::move(bins), bounds, number(j, "alpha"), number(j, "c"));
}

RatioModel ratio_model_from_json(const std::string& text) {
  const json j = expect_type(text, "density_ratio");
  const std::size_t dim = count(j, "dim");
  const auto& rows = array(j, "centers");
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != dim) {
      fail(ErrorKind::InvalidInput, "schema mismatch: center " + std::to_string(i) + " has the wrong dimension");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      centers(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
    }
  }
  const auto& th = array(j, "theta");
  Eigen::VectorXd theta(static_cast<Eigen::Index>(th.size()));
  for (std::size_t i = 0; i < th.size(); ++i) theta[static_cast<Eigen::Index>(i)] = th[i].get<double>();
  const auto& clip = field(j, "clip");
  const auto& upper = field(clip, "upper");
  RatioModel model(std::move(centers), number(j, "sigma"), number(j, "lambda"), std::move(theta),
                   number(clip, "lower"),
                   upper.is_null() ? std::numeric_limits<double>::infinity() : upper.get<double>());
  const auto& cv = field(j, "cv_score");
  if (!cv.is_null()) model.set_cv_score(cv.get<double>());
  return model;
}

}  // namespace dfcal
