// Command-line front end: solve | verify | sweep | scale | appell.
// Exit codes: 0 ok, 1 usage/parse, 2 domain/precondition, 3 numerical,
// 4 verification FAIL.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levystop/appell.hpp"
#include "levystop/errors.hpp"
#include "levystop/fluctuation.hpp"
#include "levystop/levy_model.hpp"
#include "levystop/numerics.hpp"
#include "levystop/scale_functions.hpp"
#include "levystop/simulation.hpp"
#include "levystop/stopping.hpp"
#include "levystop/verify.hpp"

namespace fs = std::filesystem;
using namespace levystop;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << content;
}

struct CommonArgs {
  std::string model_path;
  double q = 1.0;
  std::string out_dir = ".";
  double strike = 1.0;
  double nu = 1.0;
  double x0 = 0.0;
  std::size_t n_paths = 100000;
  std::size_t n_samples = 1000000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
};

void add_model_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--model", a.model_path, "Model JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--q", a.q, "Discount rate q > 0")->required();
  cmd->add_option("--out", a.out_dir, "Output directory")
      ->capture_default_str();
}

void add_problem_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--strike", a.strike, "Strike K (mckean)")
      ->capture_default_str();
  cmd->add_option("--nu", a.nu, "Power exponent nu (ns)")
      ->capture_default_str();
  cmd->add_option("--x0", a.x0, "Evaluation state")->capture_default_str();
}

CLI::Option* add_seed_flag(CLI::App* cmd, CommonArgs& a) {
  return cmd->add_option("--seed", a.seed,
                         "Master seed (all randomness derives from it)");
}

void add_mc_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--paths", a.n_paths, "Monte Carlo path count")
      ->capture_default_str();
  cmd->add_option("--samples", a.n_samples,
                  "Sample count for simulated extrema laws")
      ->capture_default_str();
  cmd->add_option("--dt", a.dt, "Path time step")->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
}

fluct::SampleConfig law_config(const CommonArgs& a) {
  fluct::SampleConfig cfg;
  cfg.n_samples = a.n_samples;
  if (a.seed_set) cfg.seed = a.seed;
  cfg.dt_cap = a.dt;
  cfg.threads = a.threads;
  return cfg;
}

stopping::Solution solve_problem(const std::string& problem,
                                 const LevyModel& m, const CommonArgs& a) {
  const Horizon h(a.q);
  const fluct::SampleConfig cfg = law_config(a);
  if (problem == "mckean") return stopping::solve_mckean(m, h, a.strike, cfg);
  if (problem == "ns") return stopping::solve_ns(m, h, a.nu, cfg);
  if (problem == "ns-exp") return stopping::solve_ns_exp(m, h, cfg);
  return stopping::solve_ss(m, h);
}

nlohmann::json solution_json(const stopping::Solution& sol, const LevyModel& m,
                             double q) {
  return {{"problem", sol.problem},
          {"model", m.to_json()},
          {"q", q},
          {"threshold", sol.threshold},
          {"diagnostics", sol.diagnostics}};
}

int run_solve(const std::string& problem, const CommonArgs& a,
              double grid_lo, double grid_hi, std::size_t grid_n) {
  const LevyModel m = LevyModel::load(a.model_path);
  const stopping::Solution sol = solve_problem(problem, m, a);
  write_file(fs::path(a.out_dir) / "solution.json",
             solution_json(sol, m, a.q).dump(2) + "\n");
  if (grid_n > 0) {
    std::string csv = "x,value,payoff\n";
    for (double x : numerics::linspace(grid_lo, grid_hi, grid_n))
      csv += fmt(x) + "," + fmt(sol.value(x)) + "," + fmt(sol.payoff(x)) + "\n";
    write_file(fs::path(a.out_dir) / "value.csv", csv);
  }
  std::cout << "problem " << sol.problem << "  threshold " << fmt(sol.threshold)
            << "  value(" << fmt(a.x0) << ") " << fmt(sol.value(a.x0)) << "\n";
  return 0;
}

int run_verify(const std::string& problem, const CommonArgs& a, double offset,
               std::optional<double> grid_lo, std::optional<double> grid_hi,
               std::size_t grid_n, double half_width) {
  const LevyModel m = LevyModel::load(a.model_path);
  const stopping::Solution sol = solve_problem(problem, m, a);
  verify::VerifyOptions opt;
  opt.n_paths = a.n_paths;
  opt.dt = a.dt;
  opt.seed = a.seed;
  opt.threads = a.threads;
  opt.x0 = a.x0;
  opt.offset = offset;
  opt.n_grid = grid_n;
  opt.half_width = half_width;
  opt.grid_lo = grid_lo;
  opt.grid_hi = grid_hi;
  const verify::VerifyReport rep = verify::verify_solution(m, Horizon(a.q), sol, opt);
  write_file(fs::path(a.out_dir) / "verify.json", rep.to_json().dump(2) + "\n");
  for (const verify::CheckResult& c : rep.checks)
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  observed "
              << fmt(c.observed) << "  expected " << fmt(c.expected)
              << "  tol " << fmt(c.tolerance) << "\n";
  std::cout << (rep.pass ? "PASS" : "FAIL") << "  " << rep.problem
            << " threshold " << fmt(rep.tested_threshold) << "\n";
  return rep.pass ? 0 : 4;
}

int run_sweep(const std::string& problem, const CommonArgs& a,
              std::optional<double> grid_lo, std::optional<double> grid_hi,
              std::size_t grid_n, double half_width) {
  const LevyModel m = LevyModel::load(a.model_path);
  const stopping::Solution sol = solve_problem(problem, m, a);
  double lo = grid_lo.value_or(sol.threshold - half_width);
  double hi = grid_hi.value_or(sol.threshold + half_width);
  if (sol.stop_kind == sim::StopKind::ReflectedAbove) lo = std::max(lo, 1e-3);
  sim::PathGrid grid = sim::PathGrid::standard(a.q, a.seed);
  grid.dt = std::min(grid.dt, a.dt);
  grid.threads = a.threads;
  const sim::SweepResult sw = sim::sweep_threshold(
      m, Horizon(a.q), sol.stop_kind, sol.payoff_spec, a.x0,
      numerics::linspace(lo, hi, grid_n), grid, a.n_paths);
  std::string csv = "y,estimate,std_error,n_paths\n";
  for (const sim::SweepPoint& p : sw.points)
    csv += fmt(p.threshold) + "," + fmt(p.estimate) + "," + fmt(p.std_error) +
           "," + std::to_string(sw.n_paths) + "\n";
  write_file(fs::path(a.out_dir) / "sweep.csv", csv);
  const nlohmann::json summary = {
      {"problem", sol.problem},
      {"analytic_threshold", sol.threshold},
      {"argmax_threshold", sw.best_threshold()},
      {"argmax_estimate", sw.best_value()},
      {"plateau_lo", sw.plateau_lo},
      {"plateau_hi", sw.plateau_hi},
      {"grid_step", sw.grid_step},
      {"n_paths", sw.n_paths},
      {"seed", sw.seed}};
  write_file(fs::path(a.out_dir) / "sweep.json", summary.dump(2) + "\n");
  std::cout << "argmax " << fmt(sw.best_threshold()) << "  plateau ["
            << fmt(sw.plateau_lo) << ", " << fmt(sw.plateau_hi) << "]\n";
  return 0;
}

int run_scale(const CommonArgs& a, double x_lo, double x_hi, std::size_t n,
              const std::string& method) {
  const LevyModel m = LevyModel::load(a.model_path);
  scale::ScaleMethod sm = scale::ScaleMethod::Auto;
  if (method == "closed")
    sm = scale::ScaleMethod::ClosedForm;
  else if (method == "numeric")
    sm = scale::ScaleMethod::NumericInversion;
  else if (method != "auto")
    throw UsageError("--method must be auto | closed | numeric");
  const scale::ScaleFunction w = scale::ScaleFunction::build(m, a.q, sm);
  std::string csv = "x,W,Z,Wp\n";
  for (double x : numerics::linspace(x_lo, x_hi, n))
    csv += fmt(x) + "," + fmt(w.W(x)) + "," + fmt(w.Z(x)) + "," +
           fmt(w.Wp(x)) + "\n";
  write_file(fs::path(a.out_dir) / "scale.csv", csv);
  std::cout << "phi " << fmt(w.phi()) << "  transform residual "
            << fmt(w.transform_residual()) << "\n";
  return 0;
}

int run_appell(const std::string& action, const CommonArgs& a,
               const std::vector<double>& ys) {
  const LevyModel m = LevyModel::load(a.model_path);
  const fluct::ExtremaLaw sup = fluct::extrema_law(
      m, Horizon(a.q), fluct::ExtremeSide::Supremum, law_config(a));
  const appell::AppellFamily fam = appell::AppellFamily::build(sup, a.nu);
  if (action == "root") {
    const nlohmann::json out = {{"nu", a.nu}, {"root", fam.root()}};
    std::cout << out.dump() << "\n";
    return 0;
  }
  if (ys.empty()) throw UsageError("appell eval: provide at least one --y");
  std::cout << "y,Q\n";
  for (double y : ys) std::cout << fmt(y) << "," << fmt(fam.eval(y)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal stopping thresholds for Levy models"};
  app.require_subcommand(1);
  const std::vector<std::string> problems = {"mckean", "ns", "ns-exp", "ss"};

  CommonArgs a;
  std::string problem, scale_action = "eval", appell_action;
  double offset = 0.0, half_width = 0.7;
  std::optional<double> grid_lo, grid_hi;
  double value_lo = -1.0, value_hi = 1.0;
  std::size_t grid_n = 41, value_n = 0;
  double x_lo = 0.01, x_hi = 10.0;
  std::size_t scale_n = 100;
  std::string scale_method = "auto";
  std::vector<double> appell_ys;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve and write solution.json");
  solve_cmd->add_option("problem", problem)->required()->check(CLI::IsMember(problems));
  add_model_flags(solve_cmd, a);
  add_problem_flags(solve_cmd, a);
  add_mc_flags(solve_cmd, a);
  CLI::Option* solve_seed = add_seed_flag(solve_cmd, a);
  solve_cmd->add_option("--value-lo", value_lo, "Value grid start");
  solve_cmd->add_option("--value-hi", value_hi, "Value grid end");
  solve_cmd->add_option("--value-n", value_n,
                        "Value grid size (0 = no value.csv)");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Solve, cross-check by Monte Carlo, write verify.json");
  verify_cmd->add_option("problem", problem)->required()->check(CLI::IsMember(problems));
  add_model_flags(verify_cmd, a);
  add_problem_flags(verify_cmd, a);
  add_mc_flags(verify_cmd, a);
  add_seed_flag(verify_cmd, a)->required();
  verify_cmd->add_option("--offset", offset,
                         "Threshold offset under test (negative control)");
  verify_cmd->add_option("--grid-lo", grid_lo, "Sweep grid start");
  verify_cmd->add_option("--grid-hi", grid_hi, "Sweep grid end");
  verify_cmd->add_option("--grid-n", grid_n, "Sweep grid size")->capture_default_str();
  verify_cmd->add_option("--half-width", half_width, "Default sweep half width")
      ->capture_default_str();

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Threshold sweep, write sweep.csv and sweep.json");
  sweep_cmd->add_option("problem", problem)->required()->check(CLI::IsMember(problems));
  add_model_flags(sweep_cmd, a);
  add_problem_flags(sweep_cmd, a);
  add_mc_flags(sweep_cmd, a);
  add_seed_flag(sweep_cmd, a)->required();
  sweep_cmd->add_option("--grid-lo", grid_lo, "Sweep grid start");
  sweep_cmd->add_option("--grid-hi", grid_hi, "Sweep grid end");
  sweep_cmd->add_option("--grid-n", grid_n, "Sweep grid size")->capture_default_str();
  sweep_cmd->add_option("--half-width", half_width, "Default sweep half width")
      ->capture_default_str();

  CLI::App* scale_cmd = app.add_subcommand("scale", "Scale function table, write scale.csv");
  scale_cmd->add_option("action", scale_action)->required()->check(CLI::IsMember({"eval"}));
  add_model_flags(scale_cmd, a);
  scale_cmd->add_option("--x-lo", x_lo)->capture_default_str();
  scale_cmd->add_option("--x-hi", x_hi)->capture_default_str();
  scale_cmd->add_option("--n", scale_n)->capture_default_str();
  scale_cmd->add_option("--method", scale_method, "auto | closed | numeric")
      ->capture_default_str();

  CLI::App* appell_cmd = app.add_subcommand("appell", "Appell family diagnostics");
  appell_cmd->add_option("action", appell_action)
      ->required()
      ->check(CLI::IsMember({"eval", "root"}));
  add_model_flags(appell_cmd, a);
  appell_cmd->add_option("--nu", a.nu, "Member index")->required();
  appell_cmd->add_option("--y", appell_ys, "Evaluation points (eval)");
  add_mc_flags(appell_cmd, a);
  CLI::Option* appell_seed = add_seed_flag(appell_cmd, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  a.seed_set = solve_seed->count() > 0 || appell_seed->count() > 0 ||
               verify_cmd->parsed() || sweep_cmd->parsed();
  try {
    if (solve_cmd->parsed())
      return run_solve(problem, a, value_lo, value_hi, value_n);
    if (verify_cmd->parsed())
      return run_verify(problem, a, offset, grid_lo, grid_hi, grid_n, half_width);
    if (sweep_cmd->parsed())
      return run_sweep(problem, a, grid_lo, grid_hi, grid_n, half_width);
    if (scale_cmd->parsed())
      return run_scale(a, x_lo, x_hi, scale_n, scale_method);
    if (appell_cmd->parsed()) return run_appell(appell_action, a, appell_ys);
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
