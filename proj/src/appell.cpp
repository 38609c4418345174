#include "levystop/appell.hpp"

#include <algorithm>
#include <cmath>

#include "levystop/errors.hpp"

namespace levystop::appell {

namespace {

bool near_integer(double s) { return std::abs(s - std::round(s)) < 1e-12; }

// Two-pass adaptive quadrature with a relative target. A fixed-panel scan
// learns the scale (the integrals here range over ~40 orders of magnitude,
// so no absolute tolerance works up front), then each panel is refined
// adaptively. Refining per panel rather than over the whole interval keeps
// a narrow peak from being accepted away at a coarse recursion level where
// every estimate is far below the global tolerance.
template <class F>
double integrate_rel(F&& f, double a, double b, double rel) {
  constexpr int kPanels = 256;  // integrand bumps span >= ~1/250 of range
  const double h = (b - a) / kPanels;
  double fv[kPanels + 1];
  long double acc = 0.0L;
  for (int i = 0; i <= kPanels; ++i) {
    fv[i] = f(a + i * h);
    if (i > 0 && i % 2 == 0)
      acc += (fv[i - 2] + 4.0L * fv[i - 1] + fv[i]) * h / 3.0L;
  }
  const double scale = std::max(std::abs(static_cast<double>(acc)), 1e-300);
  const double tol = rel * scale / kPanels;
  long double total = 0.0L;
  for (int i = 0; i < kPanels; ++i)
    total += numerics::integrate(f, a + i * h, a + (i + 1) * h, tol);
  return static_cast<double>(total);
}

}  // namespace

// ---------------------------------------------------------------------------
// Level proxies
// ---------------------------------------------------------------------------

double AppellFamily::Level::eval_raw(double y) const {
  double tau = std::log(y);
  double scale = 1.0;
  if (tau > tau_hi) {
    // power-law continuation with the level's own exponent; only reached in
    // exponentially weighted tails where O(1) relative error is harmless
    scale = std::exp(s * (tau - tau_hi));
    tau = tau_hi;
  } else if (tau < tau_lo) {
    tau = tau_lo;
  }
  if (tau < tau_mid)
    return scale * lower(tau) * std::exp(-damp_lo * tau);
  return scale * upper(tau) * std::exp(-damp_hi * tau);
}

// ---------------------------------------------------------------------------
// Build
// ---------------------------------------------------------------------------

AppellFamily AppellFamily::build(fluct::ExtremaLaw sup_law, double nu) {
  if (sup_law.side() != fluct::ExtremeSide::Supremum)
    throw UsageError("appell: the family is defined over the supremum law");
  if (!(nu > 0.0) || !std::isfinite(nu) || nu > 20.0)
    throw DomainError("appell: nu must lie in (0, 20]");

  AppellFamily fam;
  fam.law_ = std::move(sup_law);
  fam.nu_ = nu;
  fam.integer_ = near_integer(nu);
  const std::size_t n_int =
      fam.integer_ ? static_cast<std::size_t>(std::llround(nu))
                   : static_cast<std::size_t>(std::floor(nu));

  // moments of the supremum
  fam.moments_.assign(n_int + 1, 1.0);
  if (fam.law_.exact()) {
    const double r = fam.law_.exact_rate();
    for (std::size_t k = 1; k <= n_int; ++k)
      fam.moments_[k] = fam.moments_[k - 1] * static_cast<double>(k) / r;
    fam.mean_ = 1.0 / r;
  } else {
    const std::vector<double>& xs = fam.law_.samples();
    for (std::size_t k = 1; k <= n_int; ++k) {
      long double acc = 0.0L;
      for (double x : xs) acc += std::pow(static_cast<long double>(x), k);
      fam.moments_[k] =
          static_cast<double>(acc / static_cast<long double>(xs.size()));
    }
    long double acc = 0.0L;
    for (double x : xs) acc += x;
    fam.mean_ = static_cast<double>(acc / static_cast<long double>(xs.size()));
  }
  if (!(fam.mean_ > 0.0))
    throw DomainError("appell: the supremum law is degenerate at 0");

  // integer members: dQ_k/dy = k Q_{k-1} and E[Q_k(Sbar)] = 0 determine the
  // coefficients from the moments
  fam.poly_.resize(n_int + 1);
  fam.poly_[0] = {1.0};
  for (std::size_t k = 1; k <= n_int; ++k) {
    const std::vector<double>& prev = fam.poly_[k - 1];
    std::vector<double> c(k + 1, 0.0);
    for (std::size_t j = 1; j <= k; ++j)
      c[j] = static_cast<double>(k) * prev[j - 1] / static_cast<double>(j);
    double pin = 0.0;
    for (std::size_t j = 1; j <= k; ++j) pin += c[j] * fam.moments_[j];
    c[0] = -pin;
    fam.poly_[k] = std::move(c);
  }

  if (!fam.integer_) {
    fam.prepare_mellin();
    fam.chain_ = fam.build_chain(nu);
  }

  fam.root_ = fam.find_root();
  return fam;
}

void AppellFamily::prepare_mellin() {
  const double s1 = nu_ - std::floor(nu_);  // first positive chain level
  const double rel_floor = std::max(-600.0, std::min(-13.8, -27.7 / s1));
  if (law_.exact()) {
    y_floor_ = mean_ * std::exp(rel_floor);
    y_top_ = (nu_ + 50.0) * mean_ + mean_;
    return;
  }
  std::vector<double> sorted = law_.samples();
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::size_t first_pos = 0;
  while (first_pos < n && sorted[first_pos] <= 0.0) ++first_pos;
  if (n - first_pos < 32)
    throw UsageError("appell: too few positive supremum samples");
  const double s10 = sorted[std::min(first_pos + 9, n - 1)];
  y_floor_ = std::max(mean_ * std::exp(rel_floor), s10 * (1.0 + 1e-6));
  y_top_ = sorted.back() + (6.0 + nu_) * mean_;

  // proxy for ln D(u), D(u) = mean of e^{-u s_i}; evaluated from the sorted
  // samples with the exponentially negligible suffix skipped
  const double q_small =
      sorted[std::min(first_pos + std::max<std::size_t>(9, n / 1000), n - 1)];
  const double u_cap = 50.0 / std::max(q_small, 1e-12);
  mellin_vlo_ = std::log(1e-6 / mean_);
  mellin_vhi_ = std::log(u_cap);
  auto log_d = [&](double v) {
    const double u = std::exp(v);
    long double acc = 0.0L;
    const double cut = 46.0 / u;
    for (std::size_t i = 0; i < n && sorted[i] <= cut; ++i)
      acc += std::exp(static_cast<long double>(-u * sorted[i]));
    return static_cast<double>(
        std::log(std::max(acc / static_cast<long double>(n), 1e-300L)));
  };
  log_mellin_ = numerics::Chebyshev::fit(log_d, mellin_vlo_, mellin_vhi_, 200);
  has_log_mellin_ = true;
}

double AppellFamily::mellin(double u) const {
  if (!(u >= 0.0)) throw DomainError("appell: mellin argument must be >= 0");
  if (u == 0.0) return 1.0;
  if (law_.exact()) {
    const double r = law_.exact_rate();
    return r / (r + u);
  }
  if (!has_log_mellin_) {
    // integer families skip the proxy; fall back to the direct sum
    long double acc = 0.0L;
    for (double x : law_.samples())
      acc += std::exp(static_cast<long double>(-u * x));
    return static_cast<double>(acc / static_cast<long double>(law_.samples().size()));
  }
  const double v = std::log(u);
  if (v <= mellin_vlo_) return std::exp(-u * mean_);
  return std::exp(log_mellin_(std::min(v, mellin_vhi_)));
}

// Q_{s0}(y) for the negative base index via the Mellin-type integral, in
// v = ln u coordinates where both endpoints decay exponentially.
double AppellFamily::base_integral(double s0, double y) const {
  const double a = -s0;  // in (0, 1)
  const double v_peak = std::log(std::max(a / y, 1e-300));
  const double v_min = std::min(v_peak, 0.0) - 45.0 / a;
  double u_hi = (80.0 + 4.0 * std::abs(std::log(y))) / y;
  if (has_log_mellin_) u_hi = std::min(u_hi, std::exp(mellin_vhi_));
  const double v_max = std::log(u_hi);
  auto g = [&](double v) {
    const double u = std::exp(v);
    return std::exp(a * v - y * u) / mellin(u);
  };
  return integrate_rel(g, v_min, v_max, 1e-12) / std::tgamma(a);
}

std::vector<AppellFamily::Level> AppellFamily::build_chain(double s_top) const {
  const int levels = static_cast<int>(std::ceil(s_top));
  const double s0 = s_top - levels;  // in (-1, 0)

  const double tau_lo = std::log(y_floor_);
  const double tau_hi = std::log(y_top_);
  const double tau_mid = std::min(std::max(std::log(mean_), tau_lo), tau_hi);
  const int n_lo = std::min(
      720, 96 + 6 * static_cast<int>(tau_mid - tau_lo));
  const int n_hi = 128 + 16 * levels;

  const std::vector<double> nodes_lo =
      numerics::Chebyshev::nodes(tau_lo, tau_mid, n_lo);
  const std::vector<double> nodes_hi =
      numerics::Chebyshev::nodes(tau_mid, tau_hi, n_hi);

  auto damp_low = [](double s) { return s < 1.0 ? 1.0 - s : 0.0; };

  std::vector<Level> chain;
  chain.reserve(static_cast<std::size_t>(levels) + 1);

  // base level: direct integral values
  {
    Level base;
    base.s = s0;
    base.tau_lo = tau_lo;
    base.tau_mid = tau_mid;
    base.tau_hi = tau_hi;
    base.damp_lo = damp_low(s0);
    base.damp_hi = -s0;
    std::vector<double> vals(nodes_lo.size());
    for (std::size_t i = 0; i < nodes_lo.size(); ++i)
      vals[i] = base_integral(s0, std::exp(nodes_lo[i])) *
                std::exp(base.damp_lo * nodes_lo[i]);
    base.lower = numerics::Chebyshev::fit_values(tau_lo, tau_mid, vals);
    vals.assign(nodes_hi.size(), 0.0);
    for (std::size_t i = 0; i < nodes_hi.size(); ++i)
      vals[i] = base_integral(s0, std::exp(nodes_hi[i])) *
                std::exp(base.damp_hi * nodes_hi[i]);
    base.upper = numerics::Chebyshev::fit_values(tau_mid, tau_hi, vals);
    chain.push_back(std::move(base));
  }

  // lifted levels: I_l(y) = integral_{mean}^{y} Q_{l-1}, then pin the mean
  for (int l = 1; l <= levels; ++l) {
    const Level& prev = chain.back();
    const double s = s0 + l;

    // raw antiderivative at every node, accumulated outward from the anchor
    std::vector<double> taus;
    taus.reserve(nodes_lo.size() + nodes_hi.size() + 1);
    taus.insert(taus.end(), nodes_lo.begin(), nodes_lo.end());
    taus.insert(taus.end(), nodes_hi.begin(), nodes_hi.end());
    const double tau_anchor = std::log(mean_);
    taus.push_back(tau_anchor);
    std::sort(taus.begin(), taus.end());
    const std::size_t anchor =
        static_cast<std::size_t>(std::lower_bound(taus.begin(), taus.end(),
                                                  tau_anchor) -
                                 taus.begin());
    auto integrand = [&](double tau) {
      const double y = std::exp(tau);
      return prev.eval(y) * y;
    };
    std::vector<double> ivals(taus.size(), 0.0);
    for (std::size_t i = anchor; i + 1 < taus.size(); ++i)
      ivals[i + 1] =
          ivals[i] + integrate_rel(integrand, taus[i], taus[i + 1], 1e-12);
    for (std::size_t i = anchor; i-- > 0;)
      ivals[i] = ivals[i + 1] -
                 integrate_rel(integrand, taus[i], taus[i + 1], 1e-12);

    Level lvl;
    lvl.s = s;
    lvl.tau_lo = tau_lo;
    lvl.tau_mid = tau_mid;
    lvl.tau_hi = tau_hi;
    lvl.damp_lo = damp_low(s);
    lvl.damp_hi = -s;
    // map accumulated values back to the per-piece node order
    auto value_at = [&](double tau) {
      const std::size_t idx = static_cast<std::size_t>(
          std::lower_bound(taus.begin(), taus.end(), tau) - taus.begin());
      return ivals[idx];
    };
    std::vector<double> vals(nodes_lo.size());
    for (std::size_t i = 0; i < nodes_lo.size(); ++i)
      vals[i] = value_at(nodes_lo[i]) * std::exp(lvl.damp_lo * nodes_lo[i]);
    lvl.lower = numerics::Chebyshev::fit_values(tau_lo, tau_mid, vals);
    vals.assign(nodes_hi.size(), 0.0);
    for (std::size_t i = 0; i < nodes_hi.size(); ++i)
      vals[i] = value_at(nodes_hi[i]) * std::exp(lvl.damp_hi * nodes_hi[i]);
    lvl.upper = numerics::Chebyshev::fit_values(tau_mid, tau_hi, vals);

    // mean-zero pinning: Q_l = s * I_l + c with c = -s E[I_l(Sbar)]
    lvl.mult = s;
    lvl.shift = 0.0;
    double expectation;
    if (law_.exact()) {
      const double r = law_.exact_rate();
      auto weighted = [&](double tau) {
        const double y = std::exp(tau);
        return lvl.eval_raw(y) * r * std::exp(-r * y) * y;
      };
      expectation = integrate_rel(weighted, tau_lo, tau_hi, 1e-12);
    } else {
      long double acc = 0.0L;
      for (double x : law_.samples())
        acc += lvl.eval_raw(std::max(x, y_floor_));
      expectation =
          static_cast<double>(acc / static_cast<long double>(law_.samples().size()));
    }
    lvl.shift = -s * expectation;
    chain.push_back(std::move(lvl));
  }
  return chain;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double AppellFamily::eval_polynomial(std::size_t n, double y) const {
  const std::vector<double>& c = poly_[n];
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * y + c[j];
  return acc;
}

double AppellFamily::moment(std::size_t k) const {
  if (k >= moments_.size())
    throw DomainError("appell: moment order exceeds floor(nu)");
  return moments_[k];
}

double AppellFamily::eval(double y) const {
  if (integer_)
    return eval_polynomial(static_cast<std::size_t>(std::llround(nu_)), y);
  if (!(y > 0.0))
    throw DomainError("appell: fractional members are defined for y > 0");
  return chain_.back().eval(y);
}

double AppellFamily::eval_at(double s, double y) const {
  if (near_integer(s)) {
    const long long k = std::llround(s);
    if (k < 0 || static_cast<std::size_t>(k) >= poly_.size())
      throw DomainError("appell: integer member index out of range");
    return eval_polynomial(static_cast<std::size_t>(k), y);
  }
  const double frac_s = s - std::floor(s);
  const double frac_nu = nu_ - std::floor(nu_);
  if (integer_ || std::abs(frac_s - frac_nu) > 1e-9 || s > nu_ + 1e-12 ||
      s <= 0.0)
    throw DomainError(
        "appell: fractional member must share the fractional part of nu and "
        "lie in (0, nu]");
  if (!(y > 0.0))
    throw DomainError("appell: fractional members are defined for y > 0");
  const double s0 = chain_.front().s;
  const std::size_t idx = static_cast<std::size_t>(std::llround(s - s0));
  return chain_[idx].eval(y);
}

double AppellFamily::find_root() const {
  auto f = [&](double y) { return eval(std::max(y, 1e-300)); };
  double lo = mean_ * 1e-9;
  if (!integer_) lo = std::max(lo, y_floor_);
  double flo = f(lo);
  for (int i = 0; i < 8 && !(flo < 0.0); ++i) {
    lo *= 1e-1;
    flo = f(lo);
  }
  if (!(flo < 0.0))
    throw NumericalError("appell: could not find the negative branch near 0");
  const double cap = integer_ ? mean_ * 1e6 : y_top_ * 0.999;
  double hi = std::max(mean_, lo * 2.0);
  int guard = 0;
  while (f(hi) <= 0.0) {
    if (hi >= cap || ++guard > 200)
      throw NumericalError("appell: root of Q_nu not bracketed below the "
                           "working range cap");
    hi = std::min(hi * 2.0, cap);
  }
  return numerics::bisect(f, lo, hi, 1e-12);
}

}  // namespace levystop::appell
