#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levystop/simulation.hpp"
#include "levystop/stopping.hpp"

namespace levystop::verify {

// Monte Carlo cross-check of a claimed solution.  `offset` shifts the
// threshold under test away from the claimed optimum, which is how the
// negative-control path exercises the detector.
struct VerifyOptions {
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double x0 = 0.0;      // evaluation state (drawdown start for ss)
  double offset = 0.0;  // added to the claimed threshold before testing
  std::size_t n_grid = 41;
  double half_width = 0.7;  // sweep half width around the tested threshold
  std::optional<double> grid_lo, grid_hi;  // explicit sweep bounds
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string problem;
  double claimed_threshold = 0.0;
  double tested_threshold = 0.0;
  double claimed_value = 0.0;  // V(x0) from the analytic solution
  bool pass = false;
  std::vector<CheckResult> checks;
  sim::SweepResult sweep;
  sim::McEstimate estimate;

  nlohmann::json to_json() const;
};

// Runs three checks against the simulator:
//  1. the tested threshold lies in the plateau of a common-random-number
//     threshold sweep around it,
//  2. an independent estimate of the rule's value at the tested threshold
//     matches the claimed V(x0) within 3 standard errors plus an explicit
//     time-discretization allowance,
//  3. V(x0) dominates the immediate payoff G(x0).
// All three must pass.  A nonzero offset should make 1 and 2 fail.
VerifyReport verify_solution(const LevyModel& m, Horizon h,
                             const stopping::Solution& sol,
                             const VerifyOptions& opt);

}  // namespace levystop::verify
