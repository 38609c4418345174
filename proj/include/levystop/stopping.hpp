#pragma once

#include <functional>
#include <string>

#include "json.hpp"
#include "levystop/fluctuation.hpp"
#include "levystop/levy_model.hpp"
#include "levystop/scale_functions.hpp"
#include "levystop/simulation.hpp"

namespace levystop::stopping {

// A solved first-passage stopping rule: the optimal level, the value
// function, and the pieces a Monte Carlo check needs to replay the rule.
struct Solution {
  std::string problem;     // mckean | ns | ns-exp | ss
  double threshold = 0.0;  // optimal level in the monitored coordinate
  std::function<double(double)> value;   // V(x), defined on the state space
  std::function<double(double)> payoff;  // G(x)
  sim::StopKind stop_kind = sim::StopKind::PassBelow;
  sim::Payoff payoff_spec = sim::PutPayoff{1.0};
  nlohmann::json diagnostics;
};

// Perpetual put on e^{x + X} with strike K.  Stop when the price passes
// below y* = log(K E[e^I]), I the infimum at the Exp(q) horizon; the value is
// V(x) = E[(K E[e^I] - e^{x+I})^+] / E[e^I].
Solution solve_mckean(const LevyModel& m, Horizon h, double strike,
                      const fluct::SampleConfig& config = {});

// Power reward ((x + X)^+)^nu.  Stop when the state passes above the root
// a(nu) of the Appell member Q_nu of the supremum law; the value is
// V(x) = E[Q_nu(x + S); x + S >= a(nu)].
Solution solve_ns(const LevyModel& m, Horizon h, double nu,
                  const fluct::SampleConfig& config = {});

// Bounded reward (1 - e^{-(x + X)})^+.  Same structure with the role of Q_nu
// played by 1 - e^{-y}/E[e^{-S}]; the threshold is x* = -log E[e^{-S}].
Solution solve_ns_exp(const LevyModel& m, Horizon h,
                      const fluct::SampleConfig& config = {});

// Running-maximum reward: stopping pays exp(y v max X), spectrally negative
// models only.  Stop when the drawdown of the reflected process reaches the
// root z* of Z_q(z) - q W_q(z); the value is V(y) = e^y Z_q(z* - y) with y
// the starting drawdown.
Solution solve_ss(const LevyModel& m, Horizon h);

// Value at drawdown y of the suboptimal rule "stop when the drawdown reaches
// z", for 0 <= y <= z.  As a function of z it peaks at z*, where it reduces
// to e^y Z_q(z* - y).
double ss_candidate_value(const scale::ScaleFunction& w, double z, double y);

}  // namespace levystop::stopping
