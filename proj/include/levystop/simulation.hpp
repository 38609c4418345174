#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "levystop/levy_model.hpp"
#include "levystop/rng.hpp"

namespace levystop::sim {

// ---------------------------------------------------------------------------
// Path generation
// ---------------------------------------------------------------------------

// Time discretization and reproducibility controls for Monte Carlo runs.
struct PathGrid {
  double dt = 1e-3;        // maximum continuous-segment length
  double t_max = 0.0;      // hard truncation of the discounted integral
  std::uint64_t seed = 0;  // master seed; path i uses stream i
  bool antithetic = false;
  unsigned threads = 0;  // 0 = hardware concurrency

  // t_max chosen so the neglected discount mass e^{-q t_max} is 1e-6.
  static PathGrid standard(double q, std::uint64_t seed_);
};

// Jump mark in model convention: positive value means an upward jump.
template <class Rng>
double sample_jump(const LevyModel& m, Rng& rng) {
  const double p = m.up_jump_prob();
  if (p > 0.0 && (p >= 1.0 || rng.uniform() < p))
    return rng.exponential(m.eta_plus());
  return -rng.exponential(m.eta_minus());
}

// Drives one path from X_0 = 0, alternating continuous segments with exactly
// placed jumps.  The visitor receives
//   bool on_segment(t0, x0, t1, x1)   (x1 is exact in law at the endpoint)
//   bool on_jump(t, x_before, x_after)
// and stops the walk by returning false.  With sigma = 0 segments are exact
// straight lines, so no refinement grid is used for them.
template <class Rng, class Visitor>
void walk_path(const LevyModel& m, Rng& rng, double dt, double t_max,
               Visitor&& vis) {
  const double sigma = m.gaussian_sigma();
  const double mu = m.linear_drift();
  const double lambda_j = m.jump_intensity();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  double t = 0.0;
  double x = 0.0;
  double next_jump = lambda_j > 0.0 ? rng.exponential(lambda_j) : kInf;
  while (t < t_max) {
    double te = sigma > 0.0 ? std::min(t + dt, t_max) : t_max;
    bool jump_now = false;
    if (next_jump <= te) {
      te = next_jump;
      jump_now = true;
    }
    if (te > t) {
      double x1 = x + mu * (te - t);
      if (sigma > 0.0) x1 += sigma * std::sqrt(te - t) * rng.normal();
      if (!vis.on_segment(t, x, te, x1)) return;
      t = te;
      x = x1;
    }
    if (jump_now) {
      const double j = sample_jump(m, rng);
      if (!vis.on_jump(t, x, x + j)) return;
      x += j;
      next_jump = t + rng.exponential(lambda_j);
    }
  }
}

// Negates Gaussian increments, leaving jump and timing draws untouched; the
// antithetic member of a path pair.
struct AntitheticRng {
  rng::PathRng& base;
  double normal() { return -base.normal(); }
  double uniform() { return base.uniform(); }
  double exponential(double rate) { return base.exponential(rate); }
};

// ---------------------------------------------------------------------------
// Stopped-payoff estimation
// ---------------------------------------------------------------------------

// Payoffs are functions of the monitored coordinate at the stopping time.
struct PutPayoff {
  double strike;  // (K - e^s)^+
};
struct PowerPayoff {
  double nu;  // (max(s, 0))^nu
};
struct ExpGainPayoff {};  // (1 - e^{-s})^+
struct ExpOfStatePayoff {
  double beta;  // e^{beta s}; unbounded reward, used for transform estimates
};
using Payoff =
    std::variant<PutPayoff, PowerPayoff, ExpGainPayoff, ExpOfStatePayoff>;

double payoff_value(const Payoff& g, double state);
// Least upper bound of the payoff over reachable stopped states, or +inf.
double payoff_cap(const Payoff& g, double level_bound);

// What coordinate is monitored and when it triggers a stop.  PassBelow /
// PassAbove monitor x0 + X_t and the payoff sees that coordinate at the
// stop.  ReflectedAbove monitors the drawdown Y_t = M_t - X_t where the
// path X starts at 0 and M_t = max(x0, sup_{s<=t} X_s), so x0 >= 0 is the
// initial drawdown; the payoff sees M_tau, not Y_tau, at the stop.
enum class StopKind { PassBelow, PassAbove, ReflectedAbove };

struct StopSpec {
  StopKind kind = StopKind::PassBelow;
  double level = 0.0;
  double x0 = 0.0;  // initial coordinate value (y0 for ReflectedAbove)
  Payoff payoff = PutPayoff{1.0};
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  double truncated_fraction = 0.0;   // paths still running at t_max
  double truncation_bias_bound = 0.0;
};

// E[e^{-q tau} G(S_tau); tau <= t_max] by direct simulation.  Discounting is
// by weight e^{-q tau}, not by killing, so every path contributes at its
// crossing.
McEstimate estimate_stopped_payoff(const LevyModel& m, Horizon h,
                                   const StopSpec& spec, const PathGrid& grid,
                                   std::size_t n_paths);

// ---------------------------------------------------------------------------
// Threshold sweep under common random numbers
// ---------------------------------------------------------------------------

struct SweepPoint {
  double threshold = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::size_t argmax = 0;
  double grid_step = 0.0;
  // Hull of thresholds statistically tied with the maximum (within one
  // standard error), padded by half a grid step on each side.
  double plateau_lo = 0.0;
  double plateau_hi = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;

  double best_value() const { return points[argmax].estimate; }
  double best_threshold() const { return points[argmax].threshold; }
  bool plateau_contains(double level) const {
    return level >= plateau_lo && level <= plateau_hi;
  }
};

// Estimates the value of the stopping rule for every threshold in the grid
// using the same paths (common random numbers), which makes the estimated
// value curve smooth in the threshold and the argmax well defined.  Each
// path is walked once; crossings are read off the running extremum of the
// monitored coordinate.
SweepResult sweep_threshold(const LevyModel& m, Horizon h, StopKind kind,
                            const Payoff& payoff, double x0,
                            const std::vector<double>& thresholds,
                            const PathGrid& grid, std::size_t n_paths);

}  // namespace levystop::sim
