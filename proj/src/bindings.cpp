#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "levystop/appell.hpp"
#include "levystop/errors.hpp"
#include "levystop/fluctuation.hpp"
#include "levystop/levy_model.hpp"
#include "levystop/scale_functions.hpp"
#include "levystop/simulation.hpp"
#include "levystop/stopping.hpp"
#include "levystop/verify.hpp"

namespace py = pybind11;
using namespace levystop;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  using value_t = nlohmann::json::value_t;
  switch (j.type()) {
    case value_t::boolean:
      return py::bool_(j.get<bool>());
    case value_t::number_integer:
      return py::int_(j.get<long long>());
    case value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case value_t::number_float:
      return py::float_(j.get<double>());
    case value_t::string:
      return py::str(j.get<std::string>());
    case value_t::array: {
      py::list out;
      for (const auto& e : j) out.append(json_to_py(e));
      return out;
    }
    case value_t::object: {
      py::dict out;
      for (const auto& kv : j.items())
        out[py::str(kv.key())] = json_to_py(kv.value());
      return out;
    }
    default:
      return py::none();
  }
}

fluct::SampleConfig make_config(std::size_t n_samples,
                                std::optional<std::uint64_t> seed,
                                double dt_cap, unsigned threads) {
  fluct::SampleConfig cfg;
  cfg.n_samples = n_samples;
  cfg.seed = seed;
  cfg.dt_cap = dt_cap;
  cfg.threads = threads;
  return cfg;
}

stopping::Solution solve_any(const LevyModel& m, double q,
                             const std::string& problem, double strike,
                             double nu, std::size_t n_samples,
                             std::optional<std::uint64_t> seed, double dt_cap,
                             unsigned threads) {
  const Horizon h(q);
  const fluct::SampleConfig cfg = make_config(n_samples, seed, dt_cap, threads);
  if (problem == "mckean") return stopping::solve_mckean(m, h, strike, cfg);
  if (problem == "ns") return stopping::solve_ns(m, h, nu, cfg);
  if (problem == "ns-exp") return stopping::solve_ns_exp(m, h, cfg);
  if (problem == "ss") return stopping::solve_ss(m, h);
  throw UsageError("unknown problem '" + problem +
                   "' (expected mckean | ns | ns-exp | ss)");
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "Threshold stopping rules for Levy models: solvers, fluctuation "
      "identities, scale functions, and the Monte Carlo verifier.";

  py::class_<LevyModel>(mod, "Model")
      .def_static("from_json",
                  [](const std::string& text) {
                    return LevyModel::from_json(nlohmann::json::parse(text));
                  },
                  py::arg("text"),
                  "Parse a model from its JSON description "
                  "{\"family\": ..., \"params\": {...}}.")
      .def_static("load", &LevyModel::load, py::arg("path"))
      .def_static("brownian_drift", &LevyModel::brownian_drift, py::arg("mu"),
                  py::arg("sigma"))
      .def_static("jump_diffusion_exp", &LevyModel::jump_diffusion_exp,
                  py::arg("mu"), py::arg("sigma"), py::arg("jump_intensity"),
                  py::arg("up_prob"), py::arg("eta_plus"), py::arg("eta_minus"))
      .def_static("spectrally_negative_cl", &LevyModel::spectrally_negative_cl,
                  py::arg("mu"), py::arg("sigma"), py::arg("jump_intensity"),
                  py::arg("eta_minus"))
      .def_static("bounded_variation_sn", &LevyModel::bounded_variation_sn,
                  py::arg("drift"), py::arg("jump_intensity"),
                  py::arg("eta_minus"))
      .def_property_readonly("family", &LevyModel::family_name)
      .def_property_readonly("spectrally_negative",
                             &LevyModel::spectrally_negative)
      .def_property_readonly("mean_rate", &LevyModel::mean_rate)
      .def("psi",
           [](const LevyModel& m, double lam) {
             return laplace_exponent(m, lam);
           },
           py::arg("lam"))
      .def("psi_derivative",
           [](const LevyModel& m, double lam) {
             return laplace_exponent_derivative(m, lam);
           },
           py::arg("lam"))
      .def("phi", [](const LevyModel& m, double q) {
             return psi_inverse_right(m, q);
           },
           py::arg("q"), "Largest root of psi(l) = q.")
      .def("to_json",
           [](const LevyModel& m) { return m.to_json().dump(); })
      .def("describe", &LevyModel::describe)
      .def("__repr__", &LevyModel::describe);

  py::class_<stopping::Solution>(mod, "Solution")
      .def_readonly("problem", &stopping::Solution::problem)
      .def_readonly("threshold", &stopping::Solution::threshold)
      .def("value",
           [](const stopping::Solution& s, double x) { return s.value(x); },
           py::arg("x"))
      .def("payoff",
           [](const stopping::Solution& s, double x) { return s.payoff(x); },
           py::arg("x"))
      .def_property_readonly("diagnostics",
                             [](const stopping::Solution& s) {
                               return json_to_py(s.diagnostics);
                             })
      .def("__repr__", [](const stopping::Solution& s) {
        return "Solution(problem='" + s.problem +
               "', threshold=" + std::to_string(s.threshold) + ")";
      });

  mod.def("solve", &solve_any, py::arg("model"), py::arg("q"),
          py::arg("problem"), py::arg("strike") = 1.0, py::arg("nu") = 1.0,
          py::arg("n_samples") = 1000000,
          py::arg("seed") = std::optional<std::uint64_t>{},
          py::arg("dt_cap") = 1e-3, py::arg("threads") = 0,
          "Solve one of the stopping problems: mckean | ns | ns-exp | ss.");

  mod.def(
      "verify",
      [](const LevyModel& m, double q, const stopping::Solution& sol,
         std::size_t n_paths, double dt, std::uint64_t seed, double x0,
         double offset, std::size_t n_grid, double half_width,
         std::optional<double> grid_lo, std::optional<double> grid_hi,
         unsigned threads) {
        verify::VerifyOptions opt;
        opt.n_paths = n_paths;
        opt.dt = dt;
        opt.seed = seed;
        opt.x0 = x0;
        opt.offset = offset;
        opt.n_grid = n_grid;
        opt.half_width = half_width;
        opt.grid_lo = grid_lo;
        opt.grid_hi = grid_hi;
        opt.threads = threads;
        return json_to_py(
            verify::verify_solution(m, Horizon(q), sol, opt).to_json());
      },
      py::arg("model"), py::arg("q"), py::arg("solution"),
      py::arg("n_paths") = 100000, py::arg("dt") = 1e-3, py::arg("seed"),
      py::arg("x0") = 0.0, py::arg("offset") = 0.0, py::arg("n_grid") = 41,
      py::arg("half_width") = 0.7,
      py::arg("grid_lo") = std::optional<double>{},
      py::arg("grid_hi") = std::optional<double>{}, py::arg("threads") = 0,
      "Monte Carlo cross-check of a solution; returns the report as a dict.");

  py::class_<scale::ScaleFunction>(mod, "ScaleFunction")
      .def_static(
          "build",
          [](const LevyModel& m, double q, const std::string& method) {
            scale::ScaleMethod sm = scale::ScaleMethod::Auto;
            if (method == "closed")
              sm = scale::ScaleMethod::ClosedForm;
            else if (method == "numeric")
              sm = scale::ScaleMethod::NumericInversion;
            else if (method != "auto")
              throw UsageError("scale method must be auto | closed | numeric");
            return scale::ScaleFunction::build(m, q, sm);
          },
          py::arg("model"), py::arg("q"), py::arg("method") = "auto")
      .def("W", &scale::ScaleFunction::W, py::arg("x"))
      .def("Wp", &scale::ScaleFunction::Wp, py::arg("x"))
      .def("Wpp", &scale::ScaleFunction::Wpp, py::arg("x"))
      .def("Z", &scale::ScaleFunction::Z, py::arg("x"))
      .def_property_readonly("q", &scale::ScaleFunction::q)
      .def_property_readonly("phi", &scale::ScaleFunction::phi)
      .def("transform_residual", &scale::ScaleFunction::transform_residual);

  py::class_<appell::AppellFamily>(mod, "AppellFamily")
      .def_static(
          "build",
          [](const LevyModel& m, double q, double nu, std::size_t n_samples,
             std::optional<std::uint64_t> seed, double dt_cap,
             unsigned threads) {
            const fluct::SampleConfig cfg =
                make_config(n_samples, seed, dt_cap, threads);
            return appell::AppellFamily::build(
                fluct::extrema_law(m, Horizon(q),
                                   fluct::ExtremeSide::Supremum, cfg),
                nu);
          },
          py::arg("model"), py::arg("q"), py::arg("nu"),
          py::arg("n_samples") = 1000000,
          py::arg("seed") = std::optional<std::uint64_t>{},
          py::arg("dt_cap") = 1e-3, py::arg("threads") = 0)
      .def_property_readonly("nu", &appell::AppellFamily::nu)
      .def_property_readonly("integer_order",
                             &appell::AppellFamily::integer_order)
      .def("moment", &appell::AppellFamily::moment, py::arg("k"))
      .def("eval", &appell::AppellFamily::eval, py::arg("y"))
      .def("eval_at", &appell::AppellFamily::eval_at, py::arg("s"),
           py::arg("y"))
      .def("mellin", &appell::AppellFamily::mellin, py::arg("u"))
      .def_property_readonly("root", &appell::AppellFamily::root);

  mod.def(
      "extrema_samples",
      [](const LevyModel& m, double q, const std::string& side,
         std::size_t n_samples, std::uint64_t seed, double dt_cap,
         unsigned threads) {
        fluct::ExtremeSide s;
        if (side == "sup")
          s = fluct::ExtremeSide::Supremum;
        else if (side == "inf")
          s = fluct::ExtremeSide::Infimum;
        else
          throw UsageError("side must be 'sup' or 'inf'");
        const fluct::SampleConfig cfg =
            make_config(n_samples, seed, dt_cap, threads);
        const fluct::ExtremaLaw law = fluct::extrema_law(m, Horizon(q), s, cfg);
        if (law.exact())
          return py::dict(py::arg("type") = "exact",
                          py::arg("rate") = law.exact_rate());
        return py::dict(py::arg("type") = "empirical",
                        py::arg("samples") = law.samples(),
                        py::arg("seed") = law.seed());
      },
      py::arg("model"), py::arg("q"), py::arg("side"),
      py::arg("n_samples") = 100000, py::arg("seed") = 1,
      py::arg("dt_cap") = 1e-3, py::arg("threads") = 0,
      "Law of the running extremum at the Exp(q) horizon: a closed-form rate "
      "when one exists, otherwise simulated samples.");

  mod.def(
      "first_passage_transform",
      [](const LevyModel& m, double q, double beta, double x, double y,
         std::size_t n_samples, std::optional<std::uint64_t> seed,
         double dt_cap, unsigned threads) {
        const fluct::SampleConfig cfg =
            make_config(n_samples, seed, dt_cap, threads);
        const fluct::ValueWithError v =
            fluct::first_passage_transform(m, Horizon(q), beta, x, y, cfg);
        return py::make_tuple(v.value, v.std_error);
      },
      py::arg("model"), py::arg("q"), py::arg("beta"), py::arg("x"),
      py::arg("y"), py::arg("n_samples") = 1000000,
      py::arg("seed") = std::optional<std::uint64_t>{},
      py::arg("dt_cap") = 1e-3, py::arg("threads") = 0,
      "E_x[e^{-q tau_y} e^{beta X_tau}; tau_y < inf] for first passage below "
      "y; returns (value, std_error).");
}
