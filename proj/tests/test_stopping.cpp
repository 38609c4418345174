#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "levystop/errors.hpp"
#include "levystop/levy_model.hpp"
#include "levystop/scale_functions.hpp"
#include "levystop/stopping.hpp"

using namespace levystop;
using namespace levystop::stopping;

namespace {
const LevyModel kBm = LevyModel::brownian_drift(0.0, 1.0);
}

TEST_CASE("perpetual put: threshold and value function in closed form") {
  // q = 1/2, unit volatility, no drift: both extrema Exp(1), so
  // y* = log(K E[e^{Inf}]) = log(K/2) and the value decays at rate 1 above
  const auto sol = solve_mckean(kBm, Horizon(0.5), 1.0);
  CHECK(sol.problem == "mckean");
  CHECK(sol.threshold == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  const double ystar = sol.threshold;
  const double boundary_value = 1.0 - std::exp(ystar);  // = 1/2
  for (double x : {-2.0, -1.0, ystar, -0.3, 0.0, 1.0}) {
    const double want = x <= ystar
                            ? 1.0 - std::exp(x)
                            : boundary_value * std::exp(-(x - ystar));
    CHECK(sol.value(x) == doctest::Approx(want).epsilon(1e-10));
    CHECK(sol.payoff(x) ==
          doctest::Approx(std::max(1.0 - std::exp(x), 0.0)).epsilon(1e-12));
  }
  // smooth fit at the boundary: value and first derivative agree
  const double h = 1e-6;
  const double dl = (sol.value(ystar) - sol.value(ystar - h)) / h;
  const double dr = (sol.value(ystar + h) - sol.value(ystar)) / h;
  CHECK(dl == doctest::Approx(dr).epsilon(1e-4));
  CHECK(sol.diagnostics.contains("strike"));
}

TEST_CASE("perpetual put scales with the strike") {
  const auto sol = solve_mckean(kBm, Horizon(0.5), 4.0);
  CHECK(sol.threshold == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // 0 sits inside the stopping region: the value is the payoff 4 - e^0
  CHECK(sol.value(0.0) == doctest::Approx(3.0).epsilon(1e-9));
  // homogeneity: V_K(x) = K V_1(x - log K)
  const auto unit = solve_mckean(kBm, Horizon(0.5), 1.0);
  for (double x : {-0.5, 0.8, 1.5})
    CHECK(sol.value(x) ==
          doctest::Approx(4.0 * unit.value(x - std::log(4.0))).epsilon(1e-9));
  CHECK_THROWS_AS(solve_mckean(kBm, Horizon(0.5), 0.0), DomainError);
  CHECK_THROWS_AS(solve_mckean(kBm, Horizon(0.5), -2.0), DomainError);
}

TEST_CASE("power payoff: thresholds are appell roots and values match") {
  const auto s1 = solve_ns(kBm, Horizon(0.5), 1.0);
  CHECK(s1.threshold == doctest::Approx(1.0).epsilon(1e-9));
  // V(x) = e^{x-1} for x <= 1, x for x >= 1 when nu = 1
  for (double x : {-1.0, 0.0, 0.5, 1.0})
    CHECK(s1.value(x) == doctest::Approx(std::exp(x - 1.0)).epsilon(1e-8));
  for (double x : {1.5, 2.0, 4.0})
    CHECK(s1.value(x) == doctest::Approx(x).epsilon(1e-8));

  const auto s2 = solve_ns(kBm, Horizon(0.5), 2.0);
  CHECK(s2.threshold == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s2.value(0.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-8));
  for (double x : {2.0, 3.0, 5.0})
    CHECK(s2.value(x) == doctest::Approx(x * x).epsilon(1e-8));
}

TEST_CASE("power payoff with fractional exponent") {
  const auto s = solve_ns(kBm, Horizon(0.5), 1.5);
  CHECK(s.threshold == doctest::Approx(1.5).epsilon(1e-7));
  // stopping region: the value equals the payoff
  CHECK(s.value(2.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-6));
  CHECK(s.value(4.0) == doctest::Approx(8.0).epsilon(1e-6));
  // continuation region: strictly above the payoff
  CHECK(s.value(1.0) > 1.0);
}

TEST_CASE("exponential gain: threshold and two-branch value") {
  const auto sol = solve_ns_exp(kBm, Horizon(0.5));
  CHECK(sol.threshold == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const double xs = sol.threshold;
  for (double x : {xs, 1.0, 2.5})
    CHECK(sol.value(x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-10));
  for (double x : {-1.0, 0.0, 0.5}) {
    const double want = 0.5 * std::exp(-(xs - x));
    CHECK(sol.value(x) == doctest::Approx(want).epsilon(1e-10));
  }
  CHECK(sol.value(0.0) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("reflected maximal gain: scale-function threshold and value") {
  const auto sol = solve_ss(kBm, Horizon(1.0));
  const double s2 = std::sqrt(2.0);
  const double zstar = std::log(1.0 + s2) / s2;
  CHECK(sol.threshold == doctest::Approx(zstar).epsilon(1e-10));
  CHECK(sol.value(0.0) == doctest::Approx(s2).epsilon(1e-10));
  // V(y) = e^y Z(z* - y) below the barrier, e^y at and above it
  const auto w = scale::ScaleFunction::build(kBm, 1.0);
  for (double y : {0.0, 0.2, 0.5})
    CHECK(sol.value(y) ==
          doctest::Approx(std::exp(y) * w.Z(zstar - y)).epsilon(1e-10));
  for (double y : {zstar, 0.8, 1.5})
    CHECK(sol.value(y) == doctest::Approx(std::exp(y)).epsilon(1e-10));
  CHECK(sol.diagnostics.at("g_residual").get<double>() < 1e-9);
}

TEST_CASE("reflected problem candidate profile peaks at the solved barrier") {
  const auto w = scale::ScaleFunction::build(kBm, 1.0);
  const auto sol = solve_ss(kBm, Horizon(1.0));
  const double at = ss_candidate_value(w, sol.threshold, 0.0);
  CHECK(at == doctest::Approx(sol.value(0.0)).epsilon(1e-8));
  for (double z : {0.3, 0.5, 0.8, 1.2})
    CHECK(ss_candidate_value(w, z, 0.0) < at + 1e-12);
}

TEST_CASE("reflected problem preconditions") {
  // q below psi(1): the discounted reflected payoff diverges
  CHECK_THROWS_AS(solve_ss(kBm, Horizon(0.4)), PreconditionError);
  const auto bv = LevyModel::bounded_variation_sn(1.5, 2.0, 2.0);
  CHECK_THROWS_AS(solve_ss(bv, Horizon(2.0)), PreconditionError);
  CHECK_NOTHROW(solve_ss(bv, Horizon(1.2)));
  const auto jd = LevyModel::jump_diffusion_exp(0.0, 1.0, 1.0, 0.5, 3.0, 3.0);
  CHECK_THROWS_AS(solve_ss(jd, Horizon(1.0)), PreconditionError);
}

TEST_CASE("solvers expose machine-readable diagnostics") {
  const auto ss = solve_ss(kBm, Horizon(1.0));
  CHECK(ss.diagnostics.contains("phi"));
  CHECK(ss.diagnostics.contains("scale_method"));
  CHECK(ss.diagnostics.at("discount_condition_applied") == "q > psi(1)");

  // negative psi(1): the applied condition is q > 0 and it is flagged
  const auto neg = LevyModel::brownian_drift(-2.0, 1.0);
  const auto sn = solve_ss(neg, Horizon(0.25));
  CHECK(sn.diagnostics.at("discount_condition_applied") == "q > 0");

  const auto mk = solve_mckean(kBm, Horizon(0.5), 1.0);
  CHECK(mk.diagnostics.contains("inf_law"));
  const auto ns = solve_ns(kBm, Horizon(0.5), 2.0);
  CHECK(ns.diagnostics.contains("sup_law"));
}

TEST_CASE("two-sided model solved through sampled extrema") {
  const auto jd = LevyModel::jump_diffusion_exp(0.0, 1.0, 1.0, 0.5, 3.0, 3.0);
  fluct::SampleConfig cfg;
  cfg.n_samples = 20000;
  cfg.seed = 99;
  cfg.dt_cap = 2e-3;
  const auto sol = solve_mckean(jd, Horizon(1.0), 1.0, cfg);
  CHECK(sol.threshold < 0.0);
  CHECK(std::isfinite(sol.value(0.0)));
  CHECK(sol.value(0.0) > sol.payoff(0.0) - 1e-9);
  // reruns with the same seed give the same answer
  const auto sol2 = solve_mckean(jd, Horizon(1.0), 1.0, cfg);
  CHECK(sol.threshold == sol2.threshold);
  CHECK(sol.value(0.3) == sol2.value(0.3));
}
