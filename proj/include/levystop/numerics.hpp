#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "levystop/errors.hpp"

namespace levystop::numerics {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) return left + right + delta / 15.0;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on a finite interval; `tol` is an absolute tolerance on
// the integral value.
template <class F>
double integrate(F&& f, double a, double b, double tol, int max_depth = 48) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    return -integrate(std::forward<F>(f), b, a, tol, max_depth);
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Expand geometrically from `start` towards `cap` until f changes sign.
// Assumes f(start) has the sign of f everywhere below the root (monotone use).
template <class F>
std::optional<Bracket> expand_bracket(F&& f, double start, double cap,
                                      double factor = 2.0) {
  double lo = start;
  double flo = f(lo);
  if (flo == 0.0) return Bracket{lo, lo};
  double hi = lo;
  for (int i = 0; i < 200; ++i) {
    const double step = (hi == 0.0) ? 1.0 : std::abs(hi) * (factor - 1.0);
    double nxt = hi + step;
    if (nxt > cap) nxt = cap;
    const double fn = f(nxt);
    if (fn == 0.0) return Bracket{nxt, nxt};
    if ((flo < 0.0) != (fn < 0.0)) return Bracket{hi, nxt};
    hi = nxt;
    if (hi >= cap) break;
  }
  return std::nullopt;
}

// Plain bisection; requires a sign change on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw NumericalError("bisect: no sign change on bracket");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Newton iteration with a maintained bisection bracket as safeguard.  The
// bracket [lo, hi] must contain the root with a sign change.
template <class F, class DF>
double newton_bracketed(F&& f, DF&& df, double lo, double hi, double x0,
                        double xtol, int max_iter = 100) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw NumericalError("newton_bracketed: no sign change on bracket");
  double x = x0;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int i = 0; i < max_iter; ++i) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    if (hi - lo <= xtol) break;
    const double d = df(x);
    double nxt = (d != 0.0) ? x - fx / d : lo - 1.0;
    if (!(nxt > lo && nxt < hi)) nxt = 0.5 * (lo + hi);  // safeguard
    if (std::abs(nxt - x) <= xtol * 0.25) return nxt;
    x = nxt;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Chebyshev interpolation
// ---------------------------------------------------------------------------

// Chebyshev interpolant of a smooth function on [a, b], evaluated with
// Clenshaw recurrence.  Used as a fast proxy for functions whose direct
// evaluation requires quadrature.
class Chebyshev {
 public:
  Chebyshev() = default;

  static Chebyshev fit(const std::function<double(double)>& f, double a,
                       double b, int n);

  // Interpolation points used by fit, in the same order as the values taken
  // by fit_values.
  static std::vector<double> nodes(double a, double b, int n);
  static Chebyshev fit_values(double a, double b,
                              const std::vector<double>& node_values);

  double operator()(double x) const noexcept {
    const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) {
      const double b0 = 2.0 * t * b1 - b2 + coef_[k];
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + coef_[0];
  }

  double lo() const noexcept { return a_; }
  double hi() const noexcept { return b_; }
  bool covers(double x) const noexcept { return x >= a_ && x <= b_; }
  const std::vector<double>& coefficients() const noexcept { return coef_; }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<double> coef_{0.0};
};

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline bool close_rel(double a, double b, double rel, double abs = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
}

// Midpoints and endpoints of a uniform grid.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace levystop::numerics
