#pragma once

#include <vector>

#include "levystop/fluctuation.hpp"
#include "levystop/numerics.hpp"

namespace levystop::appell {

// Appell family Q_s attached to the law of the supremum at an Exp(q) time,
// normalized by E[Q_s(Sbar)] = 0 together with Q_0 = 1 and dQ_s/dy = s Q_{s-1}.
//
// Integer s: explicit polynomials in the moments of Sbar.  Fractional s: the
// chain starts from the s0 < 0 member, computed from its Mellin-type integral
//   Q_{s0}(y) = 1/Gamma(-s0) * integral_0^inf u^{-s0-1} e^{-u y} / D(u) du,
// with D(u) = E[e^{-u Sbar}], and is lifted level by level through
// antidifferentiation plus mean-zero pinning.  Levels are stored as Chebyshev
// proxies in log(y) with the power-law endpoint behavior damped off, so the
// fits stay uniformly accurate over the whole working range.
class AppellFamily {
 public:
  static AppellFamily build(fluct::ExtremaLaw sup_law, double nu);

  double nu() const noexcept { return nu_; }
  const fluct::ExtremaLaw& law() const noexcept { return law_; }
  bool integer_order() const noexcept { return integer_; }

  // E[Sbar^k] for 0 <= k <= floor(nu).
  double moment(std::size_t k) const;

  // Q_nu(y) for y > 0 (y <= 0 is outside the supremum's support and only the
  // integer polynomials extend there).
  double eval(double y) const;

  // Q_s(y) for any 0 < s <= nu with the same fractional part as nu, or any
  // integer 0 <= s <= floor(nu).  Fractional levels below nu reuse the chain.
  double eval_at(double s, double y) const;

  // Unique positive root a(nu) of Q_nu; the optimal threshold of the power
  // payoff problem.
  double root() const noexcept { return root_; }

  // E[e^{-u Sbar}], the denominator of the base integral.
  double mellin(double u) const;

 private:
  AppellFamily() = default;

  struct Level {
    double s = 0.0;      // member index
    double mult = 1.0;   // Q = mult * I + shift
    double shift = 0.0;
    double tau_lo = 0.0, tau_mid = 0.0, tau_hi = 0.0;
    double damp_lo = 0.0, damp_hi = 0.0;  // h = Q_raw * exp(damp * tau)
    numerics::Chebyshev lower, upper;     // fits of the damped raw integral I

    double eval_raw(double y) const;  // I(y) (or Q_{s0} itself at the base)
    double eval(double y) const { return mult * eval_raw(y) + shift; }
  };

  void prepare_mellin();
  double base_integral(double s0, double y) const;
  std::vector<Level> build_chain(double s_top) const;
  double eval_polynomial(std::size_t n, double y) const;
  double find_root() const;

  fluct::ExtremaLaw law_{fluct::ExtremaLaw::exact_exponential(
      fluct::ExtremeSide::Supremum, 1.0, 1.0)};
  double nu_ = 1.0;
  bool integer_ = true;
  std::vector<double> moments_;       // m_0 .. m_floor(nu)
  std::vector<std::vector<double>> poly_;  // integer members, ascending coeffs
  std::vector<Level> chain_;          // fractional members up to nu
  double root_ = 0.0;

  // law-derived quantities shared by the chain construction
  double mean_ = 0.0;      // anchor for antiderivatives
  double y_floor_ = 0.0;   // smallest y the proxies cover
  double y_top_ = 0.0;     // largest y the proxies cover
  numerics::Chebyshev log_mellin_;  // empirical laws: ln D(e^v)
  bool has_log_mellin_ = false;
  double mellin_vlo_ = 0.0, mellin_vhi_ = 0.0;
};

}  // namespace levystop::appell
