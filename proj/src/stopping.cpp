#include "levystop/stopping.hpp"

#include <cmath>

#include "levystop/appell.hpp"
#include "levystop/errors.hpp"
#include "levystop/numerics.hpp"

namespace levystop::stopping {

namespace {

nlohmann::json law_json(const fluct::ExtremaLaw& law) {
  if (law.exact())
    return {{"type", "exact"}, {"rate", law.exact_rate()}};
  return {{"type", "empirical"},
          {"n_samples", law.samples().size()},
          {"seed", law.seed()},
          {"dt_cap", law.dt_cap()}};
}

double sample_mean_of(const std::vector<double>& xs,
                      const std::function<double(double)>& f) {
  long double acc = 0.0L;
  for (double x : xs) acc += f(x);
  return static_cast<double>(acc / static_cast<long double>(xs.size()));
}

}  // namespace

Solution solve_mckean(const LevyModel& m, Horizon h, double strike,
                      const fluct::SampleConfig& config) {
  if (!(strike > 0.0) || !std::isfinite(strike))
    throw DomainError("mckean: strike must be positive and finite");
  const fluct::ExtremaLaw inf_law =
      fluct::extrema_law(m, h, fluct::ExtremeSide::Infimum, config);
  const double m_hat = fluct::exp_functional(inf_law, 1.0).value;  // E[e^I]
  const double y_star = std::log(strike * m_hat);

  Solution sol;
  sol.problem = "mckean";
  sol.threshold = y_star;
  sol.stop_kind = sim::StopKind::PassBelow;
  sol.payoff_spec = sim::PutPayoff{strike};
  sol.payoff = [strike](double x) {
    return std::max(strike - std::exp(x), 0.0);
  };
  if (inf_law.exact()) {
    const double rho = inf_law.exact_rate();
    sol.value = [strike, y_star, rho](double x) {
      if (x <= y_star) return strike - std::exp(x);
      return (strike - std::exp(y_star)) * std::exp(-rho * (x - y_star));
    };
  } else {
    const double k_tilde = strike * m_hat;
    sol.value = [inf_law, k_tilde, m_hat](double x) {
      auto f = [k_tilde, x](double s) {
        return std::max(k_tilde - std::exp(x + s), 0.0);
      };
      return sample_mean_of(inf_law.samples(), f) / m_hat;
    };
  }
  sol.diagnostics = {{"strike", strike},
                     {"exp_inf_functional", m_hat},
                     {"inf_law", law_json(inf_law)}};
  return sol;
}

Solution solve_ns(const LevyModel& m, Horizon h, double nu,
                  const fluct::SampleConfig& config) {
  if (!power_moment_finite(m, nu))
    throw PreconditionError(
        "E[(X_1 v 0)^nu] < inf",
        "power payoff: the positive jump tail has no finite moment of order " +
            std::to_string(nu));
  const fluct::ExtremaLaw sup_law =
      fluct::extrema_law(m, h, fluct::ExtremeSide::Supremum, config);
  const appell::AppellFamily fam = appell::AppellFamily::build(sup_law, nu);
  const double a = fam.root();

  Solution sol;
  sol.problem = "ns";
  sol.threshold = a;
  sol.stop_kind = sim::StopKind::PassAbove;
  sol.payoff_spec = sim::PowerPayoff{nu};
  sol.payoff = [nu](double x) { return x > 0.0 ? std::pow(x, nu) : 0.0; };
  sol.value = [fam, a](double x) {
    auto f = [&fam, x](double s) { return fam.eval(x + s); };
    return fluct::truncated_functional(fam.law(), f, a - x,
                                       fluct::TailSide::Above)
        .value;
  };
  sol.diagnostics = {{"nu", nu},
                     {"integer_order", fam.integer_order()},
                     {"sup_mean", fam.integer_order() ? fam.moment(1) : 0.0},
                     {"sup_law", law_json(sup_law)}};
  return sol;
}

Solution solve_ns_exp(const LevyModel& m, Horizon h,
                      const fluct::SampleConfig& config) {
  const fluct::ExtremaLaw sup_law =
      fluct::extrema_law(m, h, fluct::ExtremeSide::Supremum, config);
  const double m_hat = fluct::exp_functional(sup_law, -1.0).value;  // E[e^-S]
  const double x_star = -std::log(m_hat);

  Solution sol;
  sol.problem = "ns-exp";
  sol.threshold = x_star;
  sol.stop_kind = sim::StopKind::PassAbove;
  sol.payoff_spec = sim::ExpGainPayoff{};
  sol.payoff = [](double x) { return std::max(1.0 - std::exp(-x), 0.0); };
  if (sup_law.exact()) {
    const double r = sup_law.exact_rate();
    sol.value = [x_star, r](double x) {
      if (x >= x_star) return 1.0 - std::exp(-x);
      return (1.0 - std::exp(-x_star)) * std::exp(-r * (x_star - x));
    };
  } else {
    sol.value = [sup_law, m_hat, x_star](double x) {
      auto f = [m_hat, x_star, x](double s) {
        return x + s >= x_star ? 1.0 - std::exp(-(x + s)) / m_hat : 0.0;
      };
      return sample_mean_of(sup_law.samples(), f);
    };
  }
  sol.diagnostics = {{"exp_neg_sup_functional", m_hat},
                     {"sup_law", law_json(sup_law)}};
  return sol;
}

Solution solve_ss(const LevyModel& m, Horizon h) {
  const SsConditions cond = check_ss_conditions(m, h.q);
  if (!cond.ok())
    throw PreconditionError(
        cond.discount_dominates_psi1 ? "q < d" : "q > max(psi(1), 0)",
        cond.violation());
  const scale::ScaleFunction w = scale::ScaleFunction::build(m, h.q);
  const double q = h.q;
  auto g = [&w, q](double z) { return w.Z(z) - q * w.W(z); };
  // g(0) = 1 - q W(0) > 0 under the standing conditions; g eventually turns
  // negative because Z/W decreases to q/Phi(q) < q.
  double hi = 1.0 / std::max(w.phi(), 0.25);
  int guard = 0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 120)
      throw NumericalError("ss: no sign change found for Z - qW");
  }
  // derivative-free on purpose: W may fail to be C^2 without a Gaussian part
  const double z_star = numerics::bisect(g, 0.0, hi, 1e-12);
  const double residual = std::abs(g(z_star));
  if (!(residual <= 1e-10 * w.Z(z_star)))
    throw NumericalError("ss: threshold residual exceeds tolerance");

  Solution sol;
  sol.problem = "ss";
  sol.threshold = z_star;
  sol.stop_kind = sim::StopKind::ReflectedAbove;
  sol.payoff_spec = sim::ExpOfStatePayoff{1.0};
  sol.payoff = [](double y) {
    if (y < 0.0) throw DomainError("ss: drawdown state must be >= 0");
    return std::exp(y);
  };
  sol.value = [w, z_star](double y) {
    if (y < 0.0) throw DomainError("ss: drawdown state must be >= 0");
    if (y >= z_star) return std::exp(y);
    return std::exp(y) * w.Z(z_star - y);
  };
  sol.diagnostics = {
      {"phi", w.phi()},
      {"scale_method",
       w.method() == scale::ScaleMethod::ClosedForm ? "closed-form"
                                                    : "numeric-inversion"},
      {"g_residual", residual},
      {"psi_at_one", cond.psi_at_one},
      // psi(1) < 0 leaves only q > 0 to separate discounting from growth;
      // flagged so downstream readers see which condition was binding
      {"discount_condition_applied",
       cond.psi_at_one < 0.0 ? "q > 0" : "q > psi(1)"}};
  return sol;
}

double ss_candidate_value(const scale::ScaleFunction& w, double z, double y) {
  if (!(z >= 0.0) || !(y >= 0.0) || !(y <= z))
    throw DomainError("ss: candidate rule needs 0 <= y <= z");
  const double coeff =
      (w.q() * w.W(z) - w.Z(z)) / (w.Wp(z) - w.W(z));
  return std::exp(y) * (w.Z(z - y) - w.W(z - y) * coeff);
}

}  // namespace levystop::stopping
