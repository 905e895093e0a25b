#include <doctest.h>

#include <cmath>
#include <vector>

#include "dfcal/errors.hpp"
#include "dfcal/rng.hpp"
#include "dfcal/streaming.hpp"

using namespace dfcal;

TEST_CASE("state updates") {
  const StreamBinState fresh;
  const auto one = fresh.update(1);
  CHECK(one.count == 1);
  CHECK(one.mean == 1.0);
  CHECK(one.cum_var_raw == 0.25);
  const auto two = one.update(0);
  CHECK(two.count == 2);
  CHECK(two.mean == 0.5);
  CHECK(two.cum_var_raw == 1.25);
  const auto zero = fresh.update(0);
  CHECK(zero.mean == 0.0);
  CHECK(zero.cum_var_raw == 0.25);
  CHECK(zero.variance_process() == 1.0);
  CHECK(two.variance_process() == 1.25);
  CHECK_THROWS_AS((void)fresh.update(3), Error);
}

TEST_CASE("state replay is exact") {
  CounterRng rng(8);
  std::vector<int> labels(500);
  for (auto& y : labels) y = rng.bernoulli(0.3) ? 1 : 0;
  StreamBinState a, b;
  for (int y : labels) a = a.update(y);
  for (int y : labels) b = b.update(y);
  CHECK(a == b);
  // Oracle: direct sum with the running mean of the prefix.
  double raw = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double prev = i == 0 ? 0.5 : sum / static_cast<double>(i);
    raw += (labels[i] - prev) * (labels[i] - prev);
    sum += labels[i];
  }
  CHECK(a.cum_var_raw == doctest::Approx(raw).epsilon(1e-12));
  CHECK(a.mean == doctest::Approx(sum / 500.0));
}

TEST_CASE("zeta and stitching constants") {
  // mpmath, 40 digits.
  CHECK(riemann_zeta(1.4) ==
        doctest::Approx(3.105547277977580399782927215688923792402).epsilon(1e-13));
  CHECK(riemann_zeta(2.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-13));
  CHECK(riemann_zeta(4.0) == doctest::Approx(std::pow(M_PI, 4) / 90.0).epsilon(1e-13));
  CHECK_THROWS_AS(riemann_zeta(1.0), Error);

  const auto p = StitchingParams::for_bins(1, 0.1);
  CHECK(p.k1 == doctest::Approx(1.458638394258968073330161052376061458729).epsilon(1e-14));
  CHECK(p.k2 == doctest::Approx(1.872928771985109626082612393189049477475).epsilon(1e-14));
  CHECK(p.alpha_per_bin == doctest::Approx(0.05));
}

TEST_CASE("stitched boundary values") {
  const auto p = StitchingParams::for_bins(1, 0.05);
  CHECK(p.log_term(1.0) ==
        doctest::Approx(4.822069410965549211588454460984231642932).epsilon(1e-13));
  CHECK(p.log_term(1.0) == doctest::Approx(std::log(40.0 * riemann_zeta(1.4))).epsilon(1e-13));
  CHECK(stitched_boundary(1.0, p) ==
        doctest::Approx(18.61396063565066264982704184336561351043).epsilon(1e-13));
  // Values below m use S(m).
  CHECK(stitched_boundary(0.2, p) == stitched_boundary(1.0, p));
  CHECK_THROWS_AS(stitched_boundary(-1.0, p), Error);

  const auto q = StitchingParams::for_bins(5, 0.1);
  CHECK(stitched_boundary(50.0, q) ==
        doctest::Approx(47.63423590983857711227243570206167299242).epsilon(1e-13));
}

TEST_CASE("closed-form radius") {
  StreamBinState s;
  s.count = 100;
  s.mean = 0.5;
  s.cum_var_raw = 0.7;
  CHECK(closed_form_radius(s, 1, 0.05) ==
        doctest::Approx(0.2563229410684283338575929929535596084714).epsilon(1e-13));
  s.count = 10000;
  CHECK(closed_form_radius(s, 1, 0.05) ==
        doctest::Approx(0.002563229410684283338575929929535596084714).epsilon(1e-13));
  StreamBinState t;
  t.count = 200;
  t.cum_var_raw = 30.0;
  CHECK(closed_form_radius(t, 5, 0.1) ==
        doctest::Approx(0.3858076246135622853218526197304003788461).epsilon(1e-13));
  CHECK_THROWS_AS(closed_form_radius(StreamBinState{}, 1, 0.05), Error);
  CHECK_THROWS_AS(stitched_radius(StreamBinState{}, 1, 0.05), Error);
}

TEST_CASE("stream intervals") {
  StreamBinState s;
  s.count = 100;
  s.mean = 0.5;
  s.cum_var_raw = 0.5;
  const auto ci = stream_interval(s, 1, 0.05);
  CHECK(ci.lower == doctest::Approx(0.5 - 0.2563229410684283));
  CHECK(ci.upper == doctest::Approx(0.5 + 0.2563229410684283));
  const auto single = stream_interval(StreamBinState{}.update(1), 1, 0.05);
  CHECK(single == Interval{0.0, 1.0});
  CHECK(stream_interval(StreamBinState{}.update(1), 1, 0.05, StreamMode::Stitched) ==
        Interval{0.0, 1.0});
  CHECK(stream_mode_from_string("closed") == StreamMode::ClosedForm);
  CHECK(stream_mode_from_string("stitched") == StreamMode::Stitched);
  CHECK_THROWS_AS(stream_mode_from_string("other"), Error);
}

TEST_CASE("stitched never exceeds closed form") {
  for (std::size_t B : {1u, 5u, 10u, 100u}) {
    for (double alpha : {0.01, 0.05, 0.1, 0.5}) {
      for (double v = 0.0; v < 1e7; v = v * 1.37 + 0.11) {
        StreamBinState s;
        s.count = 1 + static_cast<std::size_t>(4.0 * v);
        s.cum_var_raw = v;
        REQUIRE(stitched_radius(s, B, alpha) <= closed_form_radius(s, B, alpha));
      }
    }
  }
}

TEST_CASE("calibrator routes observations to bins") {
  StreamCalibrator cal(fixed_width_scheme(2), 0.1, StreamMode::Stitched);
  CHECK(cal.observe(0.2, 1) == 0);
  CHECK(cal.observe(0.7, 0) == 1);
  CHECK(cal.observe(0.5, 1) == 1);
  CHECK(cal.observations() == 3);
  CHECK(cal.state(1).count == 2);
  CHECK(cal.state(1).mean == 0.5);
  CHECK(cal.radius(0) == stitched_radius(cal.state(0), 2, 0.1));
  CHECK_THROWS_AS(cal.observe(1.5, 1), Error);

  StreamCalibrator empty(fixed_width_scheme(3), 0.1);
  CHECK_THROWS_AS((void)empty.radius(2), EmptyBinError);
}

TEST_CASE("closed-form coverage on short streams") {
  const std::size_t B = 2;
  const double alpha = 0.1;
  const double p[B] = {0.2, 0.9};
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    CounterRng rng(31, static_cast<std::uint64_t>(t));
    StreamCalibrator cal(fixed_width_scheme(B), alpha);
    bool covered = true;
    for (int i = 0; i < 2000 && covered; ++i) {
      const double s = rng.uniform();
      const std::size_t b = cal.observe(s, rng.bernoulli(p[s < 0.5 ? 0 : 1]) ? 1 : 0);
      if (!cal.interval(b).contains(p[b])) covered = false;
    }
    ok += covered;
  }
  CHECK(ok >= 90);
}
