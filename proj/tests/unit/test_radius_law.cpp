#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hardcore/quadrature.hpp"
#include "hardcore/radius_law.hpp"

using namespace hardcore;

TEST_CASE("Pareto tail") {
  const RadiusLaw law = RadiusLaw::pareto(2.5, 1.0);
  CHECK(law.tail(1.0) == 1.0);
  CHECK(law.tail(0.5) == 1.0);
  CHECK(law.tail(4.0) == doctest::Approx(0.03125).epsilon(1e-15));
  CHECK(law.cdf(4.0) == doctest::Approx(1.0 - 0.03125).epsilon(1e-15));
  CHECK(RadiusLaw::pareto(2.0, 3.0).tail(6.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("deterministic law") {
  const RadiusLaw law = RadiusLaw::deterministic(1.0);
  CHECK(law.tail(2.0) == 0.0);
  CHECK(law.tail(0.5) == 1.0);
  CounterRng rng = CounterRng::from_seed(3);
  for (int i = 0; i < 10; ++i) CHECK(RadiusLaw::deterministic(3.0).sample(rng) == 3.0);
  CHECK(RadiusLaw::deterministic(2.0).moment_integral(3.0, 1.0) == doctest::Approx(8.0));
  CHECK(RadiusLaw::deterministic(2.0).moment_integral(3.0, 2.5) == 0.0);
}

TEST_CASE("Pareto inversion") {
  const RadiusLaw law = RadiusLaw::pareto(2.5, 1.0);
  CHECK(law.upper_quantile(0.5) == doctest::Approx(std::pow(0.5, -1.0 / 2.5)).epsilon(1e-15));
  CHECK(law.upper_quantile(0.5) == doctest::Approx(1.31951).epsilon(1e-5));
  CHECK(law.median() == law.upper_quantile(0.5));
  double previous = law.upper_quantile(1.0);
  for (double u = 0.5; u > 1e-300; u *= 1e-3) {
    const double r = law.upper_quantile(u);
    CHECK(r > previous);
    previous = r;
  }
  CHECK(previous > 1e100);
  CHECK_THROWS_AS(law.upper_quantile(0.0), std::domain_error);
}

TEST_CASE("moment integrals") {
  const RadiusLaw law = RadiusLaw::pareto(2.5, 1.0);
  CHECK(law.moment_integral(2.0, 0.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(law.moment_integral(2.0, 2.0) == doctest::Approx(5.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(law.moment_integral(2.0, 2.0) == doctest::Approx(3.53553).epsilon(1e-6));
  CHECK_FALSE(law.has_finite_moment(2.5));
  CHECK(law.has_finite_moment(2.4));

  // quadrature against the density alpha r^{-alpha-1} on [a, inf)
  for (double p : {0.0, 1.0, 2.0}) {
    for (double a : {0.0, 1.5, 10.0}) {
      const double lo = std::max(a, 1.0);
      auto density = [&](double t) {  // r = lo / t
        const double r = lo / t;
        return std::pow(r, p) * 2.5 * std::pow(r, -3.5) * lo / (t * t);
      };
      const double q = quad::integrate(density, 0.0, 1.0, quad::Tolerance{1e-300, 1e-12, 400}).value;
      CHECK(law.moment_integral(p, a) == doctest::Approx(q).epsilon(1e-9));
    }
  }
}

TEST_CASE("Karamata tail integrals") {
  const RadiusLaw law = RadiusLaw::pareto(2.5, 1.0);
  CHECK(law.karamata_asymptote(2.0, 1.0, 100.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(law.karamata_asymptote(2.0, 1.0, 100.0) == doctest::Approx(law.moment_integral(2.0, 100.0)).epsilon(1e-12));
  CHECK(law.karamata_asymptote(0.0, 1.0, 10.0) == doctest::Approx(law.tail(10.0)).epsilon(1e-12));
  CHECK(law.karamata_asymptote(0.0, 1.0, 10.0) == doctest::Approx(0.0031623).epsilon(1e-4));
  CHECK(law.karamata_asymptote(2.0, 4.0, 25.0) == doctest::Approx(law.moment_integral(2.0, 100.0)).epsilon(1e-12));
}

TEST_CASE("tabulated law") {
  const RadiusLaw law = RadiusLaw::tabulated({1.0, 2.0, 4.0}, {0.2, 0.6, 1.0});
  CHECK(law.cdf(1.0) == doctest::Approx(0.2));
  CHECK(law.cdf(1.5) == doctest::Approx(0.4));
  CHECK(law.cdf(3.0) == doctest::Approx(0.8));
  CHECK(law.tail(4.0) == doctest::Approx(0.0));
  CHECK(law.atom(1.0) == doctest::Approx(0.2));
  // E R = 0.2*1 + 0.4*1.5 + 0.4*3
  CHECK(law.moment_integral(1.0, 0.0) == doctest::Approx(0.2 + 0.6 + 1.2).epsilon(1e-12));
  // E R^2 = 0.2 + 0.4*(1+2+4)/3 + 0.4*(4+8+16)/3
  CHECK(law.moment_integral(2.0, 0.0) == doctest::Approx(0.2 + 0.4 * 7.0 / 3.0 + 0.4 * 28.0 / 3.0).epsilon(1e-12));
  CHECK(law.upper_quantile(0.2) == doctest::Approx(3.0));
  CHECK_THROWS(RadiusLaw::tabulated({1.0, 0.5}, {0.0, 1.0}));
  CHECK_THROWS(RadiusLaw::tabulated({1.0, 2.0}, {0.0, 0.9}));
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS(RadiusLaw::pareto(0.0, 1.0));
  CHECK_THROWS(RadiusLaw::pareto(2.5, -1.0));
  CHECK_THROWS(RadiusLaw::deterministic(-1.0));
}

TEST_CASE("sampling follows the tail") {
  const RadiusLaw law = RadiusLaw::pareto(2.5, 1.0);
  CounterRng rng = CounterRng::from_seed(11);
  const int n = 200000;
  int above = 0;
  for (int i = 0; i < n; ++i)
    if (law.sample(rng) > 2.0) ++above;
  const double p = law.tail(2.0);
  CHECK(std::abs(static_cast<double>(above) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}
