#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hardcore/geometry.hpp"
#include "hardcore/rng.hpp"
#include "property_checks.hpp"

using namespace hardcore;
using std::numbers::pi;

TEST_CASE("unit ball volumes in low dimensions") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * pi / 3.0).epsilon(1e-15));
  CHECK(sphere_area(3, 2.0) == doctest::Approx(16.0 * pi).epsilon(1e-15));
  CHECK_THROWS(unit_ball_volume(0));
  CHECK_THROWS(unit_ball_volume(kMaxVolumeDimension + 1));
}

TEST_CASE("lens volume examples") {
  CHECK(ball_intersection_volume(1, {1.0, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ball_intersection_volume(2, {1.0, 1.0, 3.0}) == 0.0);
  const double unit_lens = 2.0 * pi / 3.0 - std::sqrt(3.0) / 2.0;
  CHECK(ball_intersection_volume(2, {1.0, 1.0, 1.0}) == doctest::Approx(unit_lens).epsilon(1e-14));
  CHECK(unit_lens == doctest::Approx(1.228370).epsilon(1e-6));
  // two unit balls in R^3 at distance 1: pi (4 + 1)(2 - 1)^2 / 12
  CHECK(ball_intersection_volume(3, {1.0, 1.0, 1.0}) == doctest::Approx(5.0 * pi / 12.0).epsilon(1e-14));
}

TEST_CASE("unit lens against a hit-count estimate") {
  CounterRng rng = CounterRng::from_seed(17);
  const int n = 4'000'000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -1.0 + 3.0 * rng.uniform();
    const double y = -1.0 + 2.0 * rng.uniform();
    if (x * x + y * y <= 1.0 && (x - 1.0) * (x - 1.0) + y * y <= 1.0) ++hits;
  }
  const double box = 6.0;
  const double frac = static_cast<double>(hits) / n;
  const double estimate = box * frac;
  const double se = box * std::sqrt(frac * (1.0 - frac) / n);
  CHECK(std::abs(ball_intersection_volume(2, {1.0, 1.0, 1.0}) - estimate) < 4.0 * se);
}

TEST_CASE("contained and disjoint balls") {
  for (int d = 1; d <= 5; ++d) {
    CHECK(ball_intersection_volume(d, {3.0, 1.0, 1.5}) == doctest::Approx(ball_volume(d, 1.0)).epsilon(1e-14));
    CHECK(ball_intersection_volume(d, {1.0, 1.0, 2.0}) == 0.0);
    CHECK(ball_intersection_volume(d, {2.0, 2.0, 0.0}) == doctest::Approx(ball_volume(d, 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("closed forms agree with the incomplete beta route") {
  CounterRng rng = CounterRng::from_seed(5);
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 3;
    const double r1 = 0.1 + 5.0 * rng.uniform();
    const double r2 = 0.1 + 5.0 * rng.uniform();
    const double u = (r1 + r2) * rng.uniform();
    const LensSpec s{r1, r2, u};
    CHECK(ball_intersection_volume(d, s) ==
          doctest::Approx(ball_intersection_volume_beta(d, s)).epsilon(1e-11).scale(ball_volume(d, std::min(r1, r2))));
  }
}

TEST_CASE("near-tangent lens with one huge radius") {
  // The big disk's boundary is a line at this scale: the lens is a segment of height 0.5 of the unit disk.
  const double h = 0.5;
  const double segment = std::acos(1.0 - h) - (1.0 - h) * std::sqrt(2.0 * h - h * h);
  for (double big : {1e4, 1e8, 1e12}) {
    const double v = ball_intersection_volume(2, {big, 1.0, big + 1.0 - h});
    CHECK(v == doctest::Approx(segment).epsilon(std::max(1e-11, 1.0 / big)));
    CHECK(v <= ball_volume(2, 1.0));
  }
}

TEST_CASE("lens volume is nonincreasing in the distance") {
  CounterRng rng = CounterRng::from_seed(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 5;
    const double r1 = 0.2 + 3.0 * rng.uniform();
    const double r2 = 0.2 + 3.0 * rng.uniform();
    double previous = ball_intersection_volume(d, {r1, r2, 0.0});
    for (int k = 1; k <= 40; ++k) {
      const double v = ball_intersection_volume(d, {r1, r2, (r1 + r2) * k / 40.0});
      CHECK(v <= previous * (1.0 + 1e-13) + 1e-300);
      CHECK(v >= 0.0);
      previous = v;
    }
  }
}

TEST_CASE("cap volumes") {
  CHECK(cap_volume(3, 1.0, 0.0) == doctest::Approx(2.0 * pi / 3.0).epsilon(1e-14));
  CHECK(cap_volume(2, 1.0, 0.0) == doctest::Approx(pi / 2.0).epsilon(1e-14));
  // spherical cap of height h in R^3: pi h^2 (3r - h) / 3
  CHECK(cap_volume(3, 2.0, 1.0) == doctest::Approx(pi * 1.0 * (6.0 - 1.0) / 3.0).epsilon(1e-13));
  CHECK(cap_volume(3, 2.0, 2.0) == 0.0);
}

TEST_CASE("box dilation volume") {
  const std::vector<double> sides{3.0, 5.0};
  const double r = 0.7;
  CHECK(box_dilation_volume(sides, r) == doctest::Approx(15.0 + 2.0 * 8.0 * r + pi * r * r).epsilon(1e-14));
  const std::vector<double> cube{2.0, 2.0, 2.0};
  const double expected = 8.0 + 6.0 * 4.0 * r + 3.0 * pi * 2.0 * r * r + 4.0 * pi / 3.0 * r * r * r;
  CHECK(box_dilation_volume(cube, r) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("lens volumes integrate to the product of ball volumes") {
  const testing::PropertyResult r = testing::check_lens_translation_identity(123, 100, 1e-6);
  INFO(r.detail);
  CHECK(r.pass);
}
