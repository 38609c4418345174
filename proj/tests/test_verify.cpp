#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "levystop/errors.hpp"
#include "levystop/levy_model.hpp"
#include "levystop/stopping.hpp"
#include "levystop/verify.hpp"

using namespace levystop;
using namespace levystop::stopping;
using namespace levystop::verify;

namespace {

const LevyModel kBm = LevyModel::brownian_drift(0.0, 1.0);

VerifyOptions small(std::uint64_t seed) {
  VerifyOptions opt;
  opt.n_paths = 4000;
  opt.dt = 2e-3;
  opt.seed = seed;
  opt.n_grid = 21;
  return opt;
}

const CheckResult& find_check(const VerifyReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("check not found: " + name);
}

}  // namespace

TEST_CASE("correct solutions pass all three checks") {
  const auto sol = solve_mckean(kBm, Horizon(0.5), 1.0);
  const auto rep = verify_solution(kBm, Horizon(0.5), sol, small(42));
  CHECK(rep.pass);
  REQUIRE(rep.checks.size() == 3);
  CHECK(find_check(rep, "threshold-in-plateau").pass);
  CHECK(find_check(rep, "value-matches-estimate").pass);
  CHECK(find_check(rep, "value-dominates-payoff").pass);
  CHECK(rep.tested_threshold == rep.claimed_threshold);
  CHECK(rep.claimed_value == doctest::Approx(0.25).epsilon(1e-10));
  // the sweep and the estimate used different streams
  CHECK(rep.estimate.seed != rep.sweep.seed);
}

TEST_CASE("an offset threshold is detected by both statistical checks") {
  const auto sol = solve_mckean(kBm, Horizon(0.5), 1.0);
  auto opt = small(42);
  opt.offset = 0.3;
  const auto rep = verify_solution(kBm, Horizon(0.5), sol, opt);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(find_check(rep, "threshold-in-plateau").pass);
  CHECK_FALSE(find_check(rep, "value-matches-estimate").pass);
  CHECK(find_check(rep, "value-dominates-payoff").pass);
  CHECK(rep.tested_threshold ==
        doctest::Approx(rep.claimed_threshold + 0.3).epsilon(1e-12));
}

TEST_CASE("reports are seed deterministic") {
  const auto sol = solve_ns(kBm, Horizon(0.5), 1.0);
  const auto a = verify_solution(kBm, Horizon(0.5), sol, small(7));
  const auto b = verify_solution(kBm, Horizon(0.5), sol, small(7));
  CHECK(a.to_json().dump() == b.to_json().dump());
  const auto c = verify_solution(kBm, Horizon(0.5), sol, small(8));
  CHECK(a.estimate.value != c.estimate.value);
  CHECK(a.pass);
}

TEST_CASE("reflected problem verifies on a clamped positive grid") {
  const auto sol = solve_ss(kBm, Horizon(1.0));
  auto opt = small(11);
  opt.n_paths = 6000;
  opt.dt = 1e-3;  // reflected crossings carry a larger step bias
  const auto rep = verify_solution(kBm, Horizon(1.0), sol, opt);
  CHECK(rep.pass);
  for (const auto& p : rep.sweep.points) REQUIRE(p.threshold >= 1e-3);
  CHECK(rep.claimed_value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("exponential gain problem verifies") {
  const auto sol = solve_ns_exp(kBm, Horizon(0.5));
  const auto rep = verify_solution(kBm, Horizon(0.5), sol, small(23));
  CHECK(rep.pass);
  CHECK(rep.claimed_value == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("path budget floor is enforced") {
  const auto sol = solve_mckean(kBm, Horizon(0.5), 1.0);
  auto opt = small(1);
  opt.n_paths = 999;
  CHECK_THROWS_AS(verify_solution(kBm, Horizon(0.5), sol, opt), UsageError);
}

TEST_CASE("report serializes every block") {
  const auto sol = solve_mckean(kBm, Horizon(0.5), 1.0);
  const auto rep = verify_solution(kBm, Horizon(0.5), sol, small(3));
  const auto j = rep.to_json();
  CHECK(j.contains("problem"));
  CHECK(j.contains("pass"));
  CHECK(j.at("checks").size() == 3);
  CHECK(j.contains("sweep"));
  CHECK(j.at("sweep").contains("points"));
  CHECK(j.at("sweep").at("points").size() == 21);
  CHECK(j.contains("estimate"));
  CHECK(j.at("estimate").contains("std_error"));
}
