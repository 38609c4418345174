#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "levystop/rng.hpp"

using namespace levystop;

TEST_CASE("streams are reproducible and distinct") {
  rng::PathRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool same_stream_equal = true, other_stream_equal = true, other_seed_equal = true;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.normal();
    same_stream_equal &= (x == b.normal());
    other_stream_equal &= (x == c.normal());
    other_seed_equal &= (x == d.normal());
  }
  CHECK(same_stream_equal);
  CHECK_FALSE(other_stream_equal);
  CHECK_FALSE(other_seed_equal);
}

TEST_CASE("uniform stays in [0,1) and uniform_pos in (0,1)") {
  rng::Xoshiro256 g(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = g.uniform_pos();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("ziggurat normal has the right moments and tails") {
  rng::PathRng g(2024, 0);
  const std::size_t n = 4000000;
  long double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  std::size_t beyond2 = 0, beyond3 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.normal();
    s1 += x;
    s2 += static_cast<long double>(x) * x;
    s3 += static_cast<long double>(x) * x * x;
    s4 += static_cast<long double>(x) * x * x * x;
    if (std::abs(x) > 2.0) ++beyond2;
    if (std::abs(x) > 3.0) ++beyond3;
  }
  const double inv = 1.0 / static_cast<double>(n);
  const double mean = static_cast<double>(s1) * inv;
  const double var = static_cast<double>(s2) * inv - mean * mean;
  const double skew = static_cast<double>(s3) * inv;
  const double kurt = static_cast<double>(s4) * inv;
  // 5 sigma bands for each statistic
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / static_cast<double>(n)));
  CHECK(std::abs(skew) < 5.0 * std::sqrt(15.0 / static_cast<double>(n)));
  CHECK(std::abs(kurt - 3.0) < 5.0 * std::sqrt(96.0 / static_cast<double>(n)));
  // P(|Z| > 2) = 0.04550, P(|Z| > 3) = 0.002700
  const double p2 = static_cast<double>(beyond2) * inv;
  const double p3 = static_cast<double>(beyond3) * inv;
  CHECK(std::abs(p2 - 0.0455002638963584) < 5.0 * std::sqrt(0.0455 * 0.9545 * inv));
  CHECK(std::abs(p3 - 0.0026997960632602) < 5.0 * std::sqrt(0.0027 * 0.9973 * inv));
}

TEST_CASE("normal cdf agrees with erfc on a grid") {
  // histogram of 4e6 draws against the exact cdf, chi-square-ish bound
  rng::PathRng g(77, 3);
  const std::size_t n = 4000000;
  const int bins = 40;
  std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.normal();
    const int b = static_cast<int>(std::floor((x + 4.0) / 0.2));
    if (b >= 0 && b < bins) ++count[static_cast<std::size_t>(b)];
  }
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = -4.0 + 0.2 * b, hi = lo + 0.2;
    const double p = cdf(hi) - cdf(lo);
    const double expect = p * static_cast<double>(n);
    const double diff = static_cast<double>(count[static_cast<std::size_t>(b)]) - expect;
    chi2 += diff * diff / expect;
  }
  // 39 dof: mean 39, sd ~ 8.8; 5 sigma
  CHECK(chi2 < 39.0 + 5.0 * std::sqrt(78.0));
}

TEST_CASE("exponential sampler has the exact mean and is scale correct") {
  rng::PathRng g(5, 11);
  const std::size_t n = 2000000;
  long double acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += g.exponential(2.5);
  const double mean = static_cast<double>(acc / n);
  CHECK(std::abs(mean - 0.4) < 5.0 * 0.4 / std::sqrt(static_cast<double>(n)));
}
