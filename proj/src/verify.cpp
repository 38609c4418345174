#include "levystop/verify.hpp"

#include <cmath>

#include "levystop/errors.hpp"
#include "levystop/numerics.hpp"

namespace levystop::verify {

namespace {

nlohmann::json check_json(const CheckResult& c) {
  return {{"name", c.name},         {"pass", c.pass},
          {"observed", c.observed}, {"expected", c.expected},
          {"tolerance", c.tolerance}, {"detail", c.detail}};
}

}  // namespace

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json checks_j = nlohmann::json::array();
  for (const CheckResult& c : checks) checks_j.push_back(check_json(c));
  nlohmann::json points = nlohmann::json::array();
  for (const sim::SweepPoint& p : sweep.points)
    points.push_back({{"threshold", p.threshold},
                      {"estimate", p.estimate},
                      {"std_error", p.std_error}});
  return {{"problem", problem},
          {"claimed_threshold", claimed_threshold},
          {"tested_threshold", tested_threshold},
          {"claimed_value", claimed_value},
          {"pass", pass},
          {"checks", checks_j},
          {"sweep",
           {{"points", points},
            {"argmax_threshold", sweep.best_threshold()},
            {"plateau_lo", sweep.plateau_lo},
            {"plateau_hi", sweep.plateau_hi},
            {"n_paths", sweep.n_paths},
            {"seed", sweep.seed}}},
          {"estimate",
           {{"value", estimate.value},
            {"std_error", estimate.std_error},
            {"n_paths", estimate.n_paths},
            {"seed", estimate.seed},
            {"truncated_fraction", estimate.truncated_fraction},
            {"truncation_bias_bound", estimate.truncation_bias_bound}}}};
}

VerifyReport verify_solution(const LevyModel& m, Horizon h,
                             const stopping::Solution& sol,
                             const VerifyOptions& opt) {
  if (opt.n_paths < 1000)
    throw UsageError("verify: n_paths must be at least 1000");
  if (!(opt.dt > 0.0)) throw UsageError("verify: dt must be positive");

  VerifyReport rep;
  rep.problem = sol.problem;
  rep.claimed_threshold = sol.threshold;
  rep.tested_threshold = sol.threshold + opt.offset;
  rep.claimed_value = sol.value(opt.x0);

  sim::PathGrid grid = sim::PathGrid::standard(h.q, opt.seed);
  grid.dt = std::min(grid.dt, opt.dt);
  grid.threads = opt.threads;

  double lo = opt.grid_lo.value_or(rep.tested_threshold - opt.half_width);
  double hi = opt.grid_hi.value_or(rep.tested_threshold + opt.half_width);
  if (sol.stop_kind == sim::StopKind::ReflectedAbove)
    lo = std::max(lo, 1e-3);  // a drawdown threshold at 0 stops immediately
  std::vector<double> thresholds = numerics::linspace(lo, hi, opt.n_grid);
  rep.sweep = sim::sweep_threshold(m, h, sol.stop_kind, sol.payoff_spec,
                                   opt.x0, thresholds, grid, opt.n_paths);

  CheckResult plateau;
  plateau.name = "threshold-in-plateau";
  plateau.observed = rep.tested_threshold;
  plateau.expected = rep.sweep.best_threshold();
  plateau.tolerance = 0.5 * (rep.sweep.plateau_hi - rep.sweep.plateau_lo);
  plateau.pass = rep.sweep.plateau_contains(rep.tested_threshold);
  plateau.detail = "plateau [" + std::to_string(rep.sweep.plateau_lo) + ", " +
                   std::to_string(rep.sweep.plateau_hi) + "]";
  rep.checks.push_back(plateau);

  // independent estimate (different seed) of the rule actually under test
  sim::PathGrid est_grid = grid;
  est_grid.seed = opt.seed + 0x9E3779B97F4A7C15ULL;
  sim::StopSpec spec;
  spec.kind = sol.stop_kind;
  spec.level = rep.tested_threshold;
  spec.x0 = opt.x0;
  spec.payoff = sol.payoff_spec;
  rep.estimate = sim::estimate_stopped_payoff(m, h, spec, est_grid,
                                              opt.n_paths);

  // The crossing detector only sees the diffusive part at grid times, which
  // acts like a barrier shift of order sigma sqrt(dt).  At the claimed
  // optimum the value is stationary in the threshold, so the induced value
  // bias is second order; 3 sigma^2 dt |V| bounds it with a wide margin, and
  // it vanishes for sigma = 0 where crossings are exact.  Reflected rules
  // pay exp of the running maximum, and the discretely sampled maximum is
  // thin by 0.5826 sigma sqrt(dt) regardless of the threshold, a first-order
  // payoff bias that stationarity does not cancel; 0.95 sigma sqrt(dt) |V|
  // covers it with a 1.6x margin.
  const double sigma = m.gaussian_sigma();
  const double scale_v = std::max(std::abs(rep.claimed_value), 0.05);
  double disc_allowance = 3.0 * sigma * sigma * grid.dt * scale_v +
                          rep.estimate.truncation_bias_bound;
  if (sol.stop_kind == sim::StopKind::ReflectedAbove)
    disc_allowance += 0.95 * sigma * std::sqrt(grid.dt) * scale_v;
  CheckResult value;
  value.name = "value-matches-estimate";
  value.observed = rep.estimate.value;
  value.expected = rep.claimed_value;
  value.tolerance = 3.0 * rep.estimate.std_error + disc_allowance;
  value.pass =
      std::abs(rep.estimate.value - rep.claimed_value) <= value.tolerance;
  value.detail = "3 SE + discretization allowance " +
                 std::to_string(disc_allowance);
  rep.checks.push_back(value);

  CheckResult dom;
  dom.name = "value-dominates-payoff";
  dom.observed = rep.claimed_value;
  dom.expected = sol.payoff(opt.x0);
  dom.tolerance = 1e-9;
  dom.pass = rep.claimed_value >= dom.expected - dom.tolerance;
  dom.detail = "V(x0) >= G(x0)";
  rep.checks.push_back(dom);

  rep.pass = true;
  for (const CheckResult& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace levystop::verify
