#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dfcal/csv.hpp"
#include "dfcal/errors.hpp"
#include "dfcal/rng.hpp"
#include "dfcal/serialize.hpp"

using namespace dfcal;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::Numeric;
}

}  // namespace

TEST_CASE("scheme round trip") {
  CounterRng rng(2);
  std::vector<double> s(1000);
  for (auto& v : s) v = rng.uniform();
  const auto scheme = uniform_mass_scheme(s, 7);
  const auto text = to_json(scheme);
  CHECK(model_type(text) == "binning");
  const auto back = scheme_from_json(text);
  CHECK(back.edges() == scheme.edges());
  CHECK(back.kind() == scheme.kind());
  CHECK(to_json(back) == text);
}

TEST_CASE("histogram round trip with an empty bin") {
  CounterRng rng(3);
  std::vector<double> s(300);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = 0.6 * rng.uniform();
    y[i] = rng.bernoulli(0.3) ? 1 : 0;
  }
  const auto model = fit(fixed_width_scheme(5), s, y, 0.05);
  const auto text = to_json(model);
  CHECK(model_type(text) == "histogram");
  const auto back = calibrator_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.stats()[4].empty());
  CHECK(back.radii() == model.radii());
  CHECK(back.epsilon_star() == model.epsilon_star());
  CHECK(back.predict(0.1) == model.predict(0.1));
}

TEST_CASE("shift model round trip") {
  const std::vector<double> s{0.1, 0.3, 0.6, 0.9};
  const std::vector<int> y{0, 1, 1, 0};
  const std::vector<double> w{0.5, 1.0 / 3.0, 2.0, 2.5};
  const auto model = fit_weighted(fixed_width_scheme(2), s, y, w, 0.1, {1.0 / 3.0, 2.5}, 1.5);
  const auto text = to_json(model);
  CHECK(model_type(text) == "shift");
  const auto back = shift_model_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.radius().radius == model.radius().radius);
  CHECK(back.c() == 1.5);
  CHECK(back.bounds().lower == 1.0 / 3.0);
}

TEST_CASE("ratio model round trip") {
  Eigen::MatrixXd c(2, 3);
  c << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  Eigen::VectorXd t(2);
  t << 1.0 / 3.0, -2.0;
  const RatioModel m(c, 0.7, 1e-3, t);
  const auto text = to_json(m);
  CHECK(model_type(text) == "density_ratio");
  const auto back = ratio_model_from_json(text);
  CHECK(to_json(back) == text);
  CHECK(back.theta() == m.theta());
  CHECK(std::isinf(back.clip_upper()));
  const auto clipped = m.clipped(0.1, 8.0);
  CHECK(ratio_model_from_json(to_json(clipped)).clip_upper() == 8.0);
}

TEST_CASE("schema mismatches") {
  const auto scheme_text = to_json(fixed_width_scheme(3));
  CHECK(kind_of([&] { calibrator_from_json(scheme_text); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { scheme_from_json("{not json"); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { scheme_from_json(R"({"type":"binning"})"); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { model_type("[1,2]"); }) == ErrorKind::InvalidInput);
}

TEST_CASE("csv parsing") {
  const auto t = parse_csv("score,label\n0.1,0\n\n0.7,1\n", "t.csv");
  CHECK(t.header == std::vector<std::string>{"score", "label"});
  CHECK(t.rows.size() == 2);
  CHECK(t.lines == std::vector<std::size_t>{2, 4});
  CHECK(t.numbers("score") == std::vector<double>{0.1, 0.7});
  CHECK(t.labels("label") == std::vector<int>{0, 1});
  CHECK_FALSE(t.has_column("weight"));
  CHECK(kind_of([&] { t.column("weight"); }) == ErrorKind::InvalidInput);

  const auto bad = parse_csv("score,label\n0.1,0\n0.2,1\n0.3,2\n");
  try {
    bad.labels("label");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(kind_of([] { parse_csv("a\nxyz\n").numbers("a"); }) == ErrorKind::InvalidInput);
}

TEST_CASE("shortest double formatting round-trips") {
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    REQUIRE(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
