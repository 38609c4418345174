#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "levystop/numerics.hpp"

using namespace levystop;

TEST_CASE("adaptive simpson integrates smooth functions to tolerance") {
  auto cubic = [](double x) { return x * x * x - 2.0 * x + 1.0; };
  // exact: x^4/4 - x^2 + x on [0, 2] -> 4 - 4 + 2 = 2
  CHECK(numerics::integrate(cubic, 0.0, 2.0, 1e-12) == doctest::Approx(2.0).epsilon(1e-12));

  auto expf = [](double x) { return std::exp(x); };
  CHECK(numerics::integrate(expf, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));

  // reversed endpoints flip the sign
  CHECK(numerics::integrate(expf, 1.0, 0.0, 1e-12) ==
        doctest::Approx(1.0 - std::exp(1.0)).epsilon(1e-12));
  CHECK(numerics::integrate(expf, 1.0, 1.0, 1e-12) == 0.0);
}

TEST_CASE("adaptive simpson resolves a sharp but centered peak") {
  // N(0.3, 0.01) density on [0, 1]; mass ~ 1
  auto peak = [](double x) {
    const double z = (x - 0.3) / 0.01;
    return std::exp(-0.5 * z * z) / (0.01 * std::sqrt(2.0 * M_PI));
  };
  CHECK(numerics::integrate(peak, 0.0, 1.0, 1e-10) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bisect finds a bracketed root") {
  auto f = [](double x) { return x * x - 2.0; };
  const double r = numerics::bisect(f, 0.0, 2.0, 1e-13);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(numerics::bisect(f, 2.0, 3.0, 1e-13), NumericalError);
}

TEST_CASE("expand_bracket walks out geometrically") {
  auto f = [](double x) { return x - 10.0; };
  auto br = numerics::expand_bracket(f, 1.0, 1e6);
  REQUIRE(br.has_value());
  CHECK(br->lo <= 10.0);
  CHECK(br->hi >= 10.0);
  // no sign change below the cap
  CHECK_FALSE(numerics::expand_bracket(f, 1.0, 5.0).has_value());
}

TEST_CASE("newton_bracketed converges and respects the bracket") {
  auto f = [](double x) { return std::cos(x) - x; };
  auto df = [](double x) { return -std::sin(x) - 1.0; };
  const double r = numerics::newton_bracketed(f, df, 0.0, 1.0, 0.5, 1e-14);
  CHECK(f(r) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("chebyshev fit reproduces smooth functions") {
  auto f = [](double x) { return std::exp(x) * std::sin(2.0 * x); };
  const auto c = numerics::Chebyshev::fit(f, -1.0, 2.0, 48);
  for (double x : {-1.0, -0.4, 0.0, 0.77, 1.5, 2.0})
    CHECK(c(x) == doctest::Approx(f(x)).epsilon(1e-12));
  CHECK(c.covers(-1.0));
  CHECK(c.covers(2.0));
  CHECK_FALSE(c.covers(2.0001));
}

TEST_CASE("linspace hits both endpoints exactly") {
  const auto xs = numerics::linspace(-1.4, 0.0, 41);
  REQUIRE(xs.size() == 41);
  CHECK(xs.front() == -1.4);
  CHECK(xs.back() == 0.0);
  CHECK(xs[20] == doctest::Approx(-0.7).epsilon(1e-12));
}
