#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "levystop/errors.hpp"
#include "levystop/fluctuation.hpp"
#include "levystop/levy_model.hpp"

using namespace levystop;
using namespace levystop::fluct;

namespace {

SampleConfig small_cloud(std::uint64_t seed, std::size_t n = 20000) {
  SampleConfig cfg;
  cfg.n_samples = n;
  cfg.seed = seed;
  cfg.dt_cap = 5e-3;
  return cfg;
}

}  // namespace

TEST_CASE("extrema of driftless unit-volatility paths are exponential") {
  const auto bm = LevyModel::brownian_drift(0.0, 1.0);
  const auto sup = extrema_law(bm, Horizon(0.5), ExtremeSide::Supremum);
  REQUIRE(sup.exact());
  CHECK(sup.exact_rate() == doctest::Approx(1.0).epsilon(1e-12));
  const auto inf = extrema_law(bm, Horizon(0.5), ExtremeSide::Infimum);
  REQUIRE(inf.exact());
  CHECK(inf.exact_rate() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("drift splits the two exponential rates") {
  // psi(l) = l^2/2 - l/2 = 1/2: up rate (1+sqrt(5))/2, down rate (sqrt(5)-1)/2
  const auto bm = LevyModel::brownian_drift(-0.5, 1.0);
  const auto sup = extrema_law(bm, Horizon(0.5), ExtremeSide::Supremum);
  const auto inf = extrema_law(bm, Horizon(0.5), ExtremeSide::Infimum);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(sup.exact_rate() == doctest::Approx(golden).epsilon(1e-10));
  CHECK(inf.exact_rate() == doctest::Approx(golden - 1.0).epsilon(1e-10));
}

TEST_CASE("one-sided jump models keep the jump-free side exact") {
  const auto cl = LevyModel::spectrally_negative_cl(0.2, 1.0, 1.0, 2.0);
  const auto sup = extrema_law(cl, Horizon(1.0), ExtremeSide::Supremum);
  REQUIRE(sup.exact());
  CHECK(sup.exact_rate() ==
        doctest::Approx(psi_inverse_right(cl, 1.0)).epsilon(1e-12));
  // the jumpy side needs simulation, and simulation needs a pinned seed
  CHECK_THROWS_AS(extrema_law(cl, Horizon(1.0), ExtremeSide::Infimum),
                  UsageError);
  const auto inf = extrema_law(cl, Horizon(1.0), ExtremeSide::Infimum,
                               small_cloud(11, 4000));
  REQUIRE_FALSE(inf.exact());
  CHECK(inf.samples().size() == 4000);
  for (double v : inf.samples()) REQUIRE(v <= 0.0);
}

TEST_CASE("exponential functional of exact laws, with integrability guard") {
  const auto bm = LevyModel::brownian_drift(0.0, 1.0);
  const auto sup = extrema_law(bm, Horizon(0.5), ExtremeSide::Supremum);
  const auto v = exp_functional(sup, 0.4);
  CHECK(v.value == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
  CHECK(v.std_error == 0.0);
  CHECK_THROWS_AS(exp_functional(sup, 1.0), DomainError);

  const auto inf = extrema_law(bm, Horizon(0.5), ExtremeSide::Infimum);
  CHECK(exp_functional(inf, 0.4).value ==
        doctest::Approx(1.0 / 1.4).epsilon(1e-12));
}

TEST_CASE("wiener-hopf product reproduces the resolvent factor") {
  // E[e^{b Sup}] E[e^{b Inf}] = q / (q - psi(b))
  const auto bm = LevyModel::brownian_drift(-0.5, 1.0);
  const Horizon h(0.5);
  const auto sup = extrema_law(bm, h, ExtremeSide::Supremum);
  const auto inf = extrema_law(bm, h, ExtremeSide::Infimum);
  for (double b : {0.1, 0.3, 0.55}) {
    const double lhs = exp_functional(sup, b).value * exp_functional(inf, b).value;
    const double rhs = 0.5 / (0.5 - laplace_exponent(bm, b));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("wiener-hopf product holds for two-sided jumps within noise") {
  const auto jd = LevyModel::jump_diffusion_exp(0.0, 1.0, 1.0, 0.5, 3.0, 3.0);
  const Horizon h(1.0);
  const auto sup = extrema_law(jd, h, ExtremeSide::Supremum, small_cloud(21));
  const auto inf = extrema_law(jd, h, ExtremeSide::Infimum, small_cloud(22));
  const double b = 0.5;
  const auto fs = exp_functional(sup, b);
  const auto fi = exp_functional(inf, b);
  CHECK(fs.std_error > 0.0);
  const double lhs = fs.value * fi.value;
  const double rhs = 1.0 / (1.0 - laplace_exponent(jd, b));
  const double se = fs.std_error * fi.value + fi.std_error * fs.value;
  // 4 SE plus a 2% discretization allowance on the extrema
  CHECK(std::abs(lhs - rhs) < 4.0 * se + 0.02 * rhs);
}

TEST_CASE("truncated functional against closed-form tail integrals") {
  const auto bm = LevyModel::brownian_drift(0.0, 1.0);
  const auto sup = extrema_law(bm, Horizon(0.5), ExtremeSide::Supremum);
  auto ident = [](double s) { return s; };
  for (double a : {0.3, 0.7, 2.0}) {
    const double above = truncated_functional(sup, ident, a, TailSide::Above).value;
    CHECK(above == doctest::Approx(std::exp(-a) * (a + 1.0)).epsilon(1e-10));
    const double below = truncated_functional(sup, ident, a, TailSide::Below).value;
    CHECK(above + below == doctest::Approx(1.0).epsilon(1e-10));
  }
  // cutoff below the support: Above captures everything, Below nothing
  CHECK(truncated_functional(sup, ident, -1.0, TailSide::Above).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(truncated_functional(sup, ident, -1.0, TailSide::Below).value == 0.0);
}

TEST_CASE("truncated functional on samples uses strict tail inequalities") {
  auto law = ExtremaLaw::empirical(ExtremeSide::Supremum, 1.0,
                                   {0.0, 1.0, 1.0, 2.0, 3.0}, 5, 1e-3);
  auto one = [](double) { return 1.0; };
  CHECK(truncated_functional(law, one, 1.0, TailSide::Above).value ==
        doctest::Approx(0.4));  // strictly above: {2, 3}
  CHECK(truncated_functional(law, one, 1.0, TailSide::Below).value ==
        doctest::Approx(0.2));  // strictly below: {0}
}

TEST_CASE("first passage transform matches the jump-free closed form") {
  const auto bm = LevyModel::brownian_drift(0.0, 1.0);
  // no downward jumps: X stops exactly at y, so the value is
  // exp(b y) exp(-(x - y) rho) with rho the infimum rate (= 1 at q = 1/2)
  const auto got = first_passage_transform(bm, Horizon(0.5), 0.5, 0.0, -0.7);
  CHECK(got.value == doctest::Approx(std::exp(-0.35 - 0.7)).epsilon(1e-10));
  CHECK(got.std_error == 0.0);
  // starting below the barrier pays immediately
  const auto at = first_passage_transform(bm, Horizon(0.5), 0.5, -1.0, -0.7);
  CHECK(at.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
}

TEST_CASE("empirical law persistence roundtrips and checks the model") {
  const auto jd = LevyModel::jump_diffusion_exp(0.0, 1.0, 1.0, 0.5, 3.0, 3.0);
  const auto sup =
      extrema_law(jd, Horizon(1.0), ExtremeSide::Supremum, small_cloud(33, 2000));
  const std::string stem = "/tmp/levystop_test_law";
  save_extrema_law(sup, jd, stem);
  const auto back = load_extrema_law(stem, &jd);
  REQUIRE(back.samples().size() == sup.samples().size());
  CHECK(back.samples() == sup.samples());
  CHECK(back.q() == sup.q());
  CHECK(back.seed() == sup.seed());
  CHECK(back.side() == ExtremeSide::Supremum);

  const auto other = LevyModel::brownian_drift(0.0, 1.0);
  CHECK_THROWS_AS(load_extrema_law(stem, &other), UsageError);

  const auto exact = extrema_law(other, Horizon(0.5), ExtremeSide::Supremum);
  CHECK_THROWS_AS(save_extrema_law(exact, other, stem), UsageError);
  std::remove((stem + ".csv").c_str());
  std::remove((stem + ".json").c_str());
}

TEST_CASE("sample clouds are seed deterministic") {
  const auto jd = LevyModel::jump_diffusion_exp(0.0, 1.0, 1.0, 0.5, 3.0, 3.0);
  const auto a =
      extrema_law(jd, Horizon(1.0), ExtremeSide::Supremum, small_cloud(9, 3000));
  const auto b =
      extrema_law(jd, Horizon(1.0), ExtremeSide::Supremum, small_cloud(9, 3000));
  CHECK(a.samples() == b.samples());
  const auto c =
      extrema_law(jd, Horizon(1.0), ExtremeSide::Supremum, small_cloud(10, 3000));
  CHECK(a.samples() != c.samples());
  for (double v : a.samples()) REQUIRE(v >= 0.0);
}
