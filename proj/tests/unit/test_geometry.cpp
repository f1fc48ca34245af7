#include <cmath>
#include <vector>

#include "doctest.h"
#include "heatsum/geometry.hpp"

using namespace heatsum;
using namespace heatsum::geometry;

namespace {

// sigma(s) = 2s sampled on a fine linear grid.
EndSpec tabulated_quadratic(double r_hi) {
  std::vector<double> radii, weight;
  for (double s = 0.5; s <= r_hi + 1.0; s += 0.05) {
    radii.push_back(s);
    weight.push_back(2.0 * s);
  }
  return EndSpec::tabulated(0, radii, weight);
}

// Tabulated V(r) ~ r^2 / log r: weight e below s = e, then d/ds (s^2/log s).
EndSpec tabulated_r2_over_log(double r_hi) {
  std::vector<double> radii, weight;
  double s = 0.5;
  while (s <= r_hi) {
    radii.push_back(s);
    if (s < kOffsetE) {
      weight.push_back(kOffsetE);
    } else {
      double ls = std::log(s);
      weight.push_back(2.0 * s / ls - s / (ls * ls));
    }
    s *= 1.05;
  }
  radii.push_back(r_hi * 1.05);
  weight.push_back(weight.back());
  return EndSpec::tabulated(0, radii, weight);
}

}  // namespace

TEST_CASE("volume_ball closed forms") {
  auto e2 = EndSpec::power_law(0, 2.0);
  CHECK(volume_ball(e2, 10.0) == doctest::Approx(101.0).epsilon(1e-12));
  auto e1 = EndSpec::power_law(0, 1.0);
  CHECK(volume_ball(e1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(volume_ball(e1, 0.0), DomainError);
  CHECK_THROWS_AS(volume_ball(e1, -3.0), DomainError);
}

TEST_CASE("volume_ball tabulated quadrature matches closed form") {
  auto tab = tabulated_quadratic(100.0);
  CHECK(volume_ball(tab, 50.0) == doctest::Approx(2500.0).epsilon(5e-3));
  // strictly increasing
  double prev = 0.0;
  for (double r = 1.0; r < 90.0; r *= 1.5) {
    double v = volume_ball(tab, r);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("volume doubling band") {
  // V(2r)/V(r) <= 2^alpha (1 + eps) with eps covering the cap correction at
  // small radii.
  const double eps_grid = 0.6;
  for (double alpha : {0.2, 0.5, 1.0, 1.5, 2.0}) {
    auto end = EndSpec::power_law(0, alpha);
    for (double r = 1.0; r <= 1e4; r *= 2.0) {
      double ratio = volume_ball(end, 2.0 * r) / volume_ball(end, r);
      CHECK(ratio <= std::pow(2.0, alpha) * (1.0 + eps_grid));
    }
  }
}

TEST_CASE("off_center_volume") {
  auto e2 = EndSpec::power_law(0, 2.0);
  for (double ax : {kOffsetE, 10.0, 300.0}) {
    for (double r : {1.0, 7.0, 90.0}) {
      double v = off_center_volume(e2, ax, r);
      CHECK(v <= r * r * (1.0 + 1e-12));
      CHECK(v >= 0.5 * r * r);
    }
  }
  auto e1 = EndSpec::power_law(0, 1.0);
  CHECK(off_center_volume(e1, 100.0, 10.0) == doctest::Approx(100.0 / 11.0).epsilon(1e-12));
  auto tab = tabulated_quadratic(100.0);
  CHECK_THROWS_AS(off_center_volume(tab, 10.0, 1.0), UnsupportedProfileError);
}

TEST_CASE("classify_end dichotomy") {
  CHECK(classify_end(PowerLawProfile{2.0}, 1e2, 1e6).kind == EndClassKind::Critical);
  CHECK(classify_end(PowerLawProfile{1.0}, 1e2, 1e6).kind == EndClassKind::Subcritical);
  CHECK(classify_end(PowerLawProfile{1.5}, 1e2, 1e6).kind == EndClassKind::Subcritical);

  auto neither = tabulated_r2_over_log(1e10);
  CHECK(neither.cached_class.kind == EndClassKind::Neither);
}

TEST_CASE("classify_end is stable under profile rescaling") {
  std::vector<double> radii, weight;
  for (double s = 0.5; s <= 2e4; s *= 1.04) {
    radii.push_back(s);
    weight.push_back(1.5 * std::pow(std::max(s, 1.0), 0.5));  // alpha = 1.5 shape
  }
  auto base = classify_end(TabulatedProfile{radii, weight}, 1e2, 1e4);
  CHECK(base.kind == EndClassKind::Subcritical);
  for (double c : {0.5, 0.7, 1.3, 2.0}) {
    std::vector<double> scaled = weight;
    for (auto& w : scaled) w *= c;
    auto cls = classify_end(TabulatedProfile{radii, scaled}, 1e2, 1e4);
    CHECK(cls.kind == base.kind);
    CHECK(cls.witness == doctest::Approx(base.witness).epsilon(1e-6));
  }
}

TEST_CASE("h_func branches") {
  auto e1 = EndSpec::power_law(0, 1.0);
  auto e2 = EndSpec::power_law(0, 2.0);
  CHECK(h_func(e1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h_func(e2, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(h_func(e1, 0.5), DomainError);

  // alpha = 2: H(r) ~ log r
  double r = std::exp(10.0);
  double h = h_func(e2, r);
  CHECK(h / 10.0 > 0.4);
  CHECK(h / 10.0 < 2.5);

  // alpha = 1: integral is exactly r - 1 (V(s) = s), so H = r.
  CHECK(h_func(e1, 100.0) == doctest::Approx(100.0).epsilon(1e-6));

  // closed-form band over [10, 1e4]
  for (double rr = 10.0; rr <= 1e4; rr *= 3.0) {
    double sub = h_func(e1, rr) / (rr * rr / volume_ball(e1, rr));
    CHECK(sub > 0.5);
    CHECK(sub < 3.0);
    double crit = h_func(e2, rr) / std::log(rr);
    CHECK(crit > 0.4);
    CHECK(crit < 2.5);
  }

  // monotone nondecreasing
  double prev = 0.0;
  for (double rr = 1.0; rr < 1e4; rr *= 2.0) {
    double h2 = h_func(e2, rr);
    CHECK(h2 >= prev);
    prev = h2;
  }
}

TEST_CASE("parabolicity proxy: partial integrals") {
  // int_1^R r dr / V(r) strictly increasing, ratio >= 1.5 per decade below
  // criticality, log-like at alpha = 2.
  auto partial = [](const EndSpec& end, double r_hi) {
    return h_func(end, r_hi) - 1.0;
  };
  for (double alpha : {1.0, 1.5}) {
    auto end = EndSpec::power_law(0, alpha);
    double i2 = partial(end, 1e2), i3 = partial(end, 1e3), i4 = partial(end, 1e4);
    CHECK(i2 < i3);
    CHECK(i3 < i4);
    CHECK(i3 / i2 >= 1.5);
    CHECK(i4 / i3 >= 1.5);
  }
  auto crit = EndSpec::power_law(0, 2.0);
  for (double r_hi : {1e2, 1e3, 1e4}) {
    double ratio = partial(crit, r_hi) / std::log(r_hi);
    CHECK(ratio > 0.4);
    CHECK(ratio < 1.5);
  }
}

TEST_CASE("distance conventions") {
  auto sum = SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(1, 2.0)});
  auto x = Point::on_end(0, 10.0);
  auto y = Point::on_end(1, 5.0);
  CHECK(distance(sum, x, x) == 0.0);
  CHECK(distance(sum, x, y) ==
        doctest::Approx((10.0 - kOffsetE) + (5.0 - kOffsetE)).epsilon(1e-12));
  CHECK(distance(sum, x, y) == distance(sum, y, x));
  CHECK(distance(sum, Point::center(), y) == doctest::Approx(5.0 - kOffsetE));

  // triangle inequality over a small point set
  std::vector<Point> pts = {Point::center(), Point::on_end(0, 3.0), Point::on_end(0, 20.0),
                            Point::on_end(1, 4.0), Point::on_end(1, 15.0)};
  for (const auto& a : pts)
    for (const auto& b : pts)
      for (const auto& c : pts)
        CHECK(distance(sum, a, b) <= distance(sum, a, c) + distance(sum, c, b) + 1e-12);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(EndSpec::power_law(0, 0.0), DomainError);
  CHECK_THROWS_AS(EndSpec::power_law(0, 2.5), DomainError);
  CHECK_THROWS_AS(SumSpec::make({EndSpec::power_law(0, 1.0)}), DomainError);
  CHECK_THROWS_AS(SumSpec::make({EndSpec::power_law(0, 1.0), EndSpec::power_law(0, 2.0)}),
                  DomainError);
  CHECK_THROWS_AS(Point::on_end(0, 1.0), DomainError);
  CHECK_THROWS_AS(classify_end(PowerLawProfile{1.0}, 100.0, 500.0), DomainError);
}
