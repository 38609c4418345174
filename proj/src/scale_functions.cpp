#include "levystop/scale_functions.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

#include "levystop/errors.hpp"
#include "levystop/numerics.hpp"

namespace levystop::scale {

namespace {

using cplx = std::complex<double>;

// Real roots of a polynomial with coefficients c[0] + c[1] x + ... (degree 2
// or 3) via the companion matrix; complains if any root strays off the real
// axis, which for these characteristic polynomials signals a bug upstream.
std::vector<double> real_roots(const std::vector<double>& c) {
  const std::size_t deg = c.size() - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(deg),
                                               static_cast<long>(deg));
  for (std::size_t i = 0; i + 1 < deg; ++i)
    comp(static_cast<long>(i + 1), static_cast<long>(i)) = 1.0;
  for (std::size_t i = 0; i < deg; ++i)
    comp(static_cast<long>(i), static_cast<long>(deg - 1)) =
        -c[i] / c[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<double> roots;
  double scale = 0.0;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    scale = std::max(scale, std::abs(es.eigenvalues()[i]));
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-9 * std::max(1.0, scale))
      throw NumericalError(
          "scale function: complex root of the characteristic polynomial");
    roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Coefficients (ascending) of C(l) = (psi(l) - q) * (eta + l) for models with
// down-exponential jumps, or psi(l) - q itself when there are none.  The
// numerator of the rational transform 1/(psi - q) is (eta + l) or 1
// respectively.
struct RationalTransform {
  std::vector<double> denom;  // C(l), ascending coefficients
  bool with_eta;              // numerator is (eta + l)?
  double eta;
};

RationalTransform characteristic(const LevyModel& m, double q) {
  const double s2 = m.gaussian_sigma() * m.gaussian_sigma();
  const double mu = m.linear_drift();
  const double lj = m.jump_intensity();
  RationalTransform rt;
  if (lj > 0.0) {
    const double eta = m.eta_minus();
    rt.with_eta = true;
    rt.eta = eta;
    if (s2 > 0.0) {
      rt.denom = {-q * eta, mu * eta - lj - q, mu + 0.5 * s2 * eta, 0.5 * s2};
    } else {
      rt.denom = {-q * eta, mu * eta - lj - q, mu};
    }
  } else {
    rt.with_eta = false;
    rt.eta = 0.0;
    rt.denom = {-q, mu, 0.5 * s2};
  }
  return rt;
}

double poly_eval_derivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 1;)
    acc = acc * x + c[i] * static_cast<double>(i);
  return acc;
}

// --- fixed Talbot inversion -------------------------------------------------

// Node count balances the two error sources: truncation falls like
// 10^{-0.6 M} while the summands grow like e^{2M/5} and amplify the
// double-precision roundoff of each node evaluation by that factor.  M = 32
// puts truncation near 1e-19 and roundoff near 4e-11; larger M only makes
// the roundoff worse.
constexpr int kTalbotNodes = 32;

// Numerical inverse Laplace transform of F at x > 0 (Abate-Valko fixed
// Talbot), accumulated in long double.
template <class F>
double talbot(F&& f, double x) {
  const int m = kTalbotNodes;
  const double r = 2.0 * m / (5.0 * x);
  long double acc = 0.5L * static_cast<long double>((f(cplx(r, 0.0)) *
                                                     std::exp(cplx(r * x, 0.0)))
                                                        .real());
  for (int k = 1; k < m; ++k) {
    const double theta = k * M_PI / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const cplx s(r * theta * cot, r * theta);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    const cplx val = std::exp(s * x) * f(s) * cplx(1.0, sigma);
    acc += static_cast<long double>(val.real());
  }
  return static_cast<double>(acc * static_cast<long double>(r) / m);
}

}  // namespace

ScaleFunction ScaleFunction::build(const LevyModel& m, double q,
                                   ScaleMethod method) {
  if (!m.spectrally_negative())
    throw PreconditionError(
        "spectrally negative",
        "scale functions are defined only for models without positive jumps");
  if (!(q >= 0.0) || !std::isfinite(q))
    throw DomainError("scale function: q must be >= 0 and finite");

  ScaleFunction sf;
  sf.model_ = m;
  sf.q_ = q;
  sf.phi_ = psi_inverse_right(m, q);
  sf.method_ =
      method == ScaleMethod::Auto ? ScaleMethod::ClosedForm : method;

  if (sf.method_ == ScaleMethod::ClosedForm) {
    const RationalTransform rt = characteristic(m, q);
    const std::vector<double> roots = real_roots(rt.denom);
    // distinct-root partial fractions; a repeated root (possible only at
    // q = 0 with zero mean) has no representation of this form
    double span = 0.0;
    for (double root : roots) span = std::max(span, std::abs(root));
    for (std::size_t i = 0; i + 1 < roots.size(); ++i)
      if (roots[i + 1] - roots[i] <= 1e-8 * std::max(1.0, span))
        throw NumericalError(
            "scale function: repeated characteristic root; the "
            "sum-of-exponentials representation does not exist");
    for (double root : roots) {
      const double num = rt.with_eta ? rt.eta + root : 1.0;
      sf.terms_.emplace_back(num / poly_eval_derivative(rt.denom, root),
                             root);
    }
    // internal consistency: the largest root is Phi(q)
    if (std::abs(roots.back() - sf.phi_) > 1e-7 * std::max(1.0, sf.phi_))
      throw NumericalError(
          "scale function: largest characteristic root disagrees with Phi(q)");
  }
  return sf;
}

double ScaleFunction::W(double x) const {
  if (x < 0.0) return 0.0;
  if (method_ == ScaleMethod::NumericInversion) return numeric_W(x);
  long double acc = 0.0L;
  for (const auto& [w, l] : terms_)
    acc += static_cast<long double>(w) * std::exp(static_cast<long double>(l * x));
  return static_cast<double>(acc);
}

double ScaleFunction::Wp(double x) const {
  if (x < 0.0) return 0.0;
  if (method_ == ScaleMethod::NumericInversion) {
    const double h = 1e-5 * (1.0 + std::abs(x));
    const double xl = std::max(x - h, 1e-12);
    return (numeric_W(x + h) - numeric_W(xl)) / (x + h - xl);
  }
  long double acc = 0.0L;
  for (const auto& [w, l] : terms_)
    acc += static_cast<long double>(w) * l *
           std::exp(static_cast<long double>(l * x));
  return static_cast<double>(acc);
}

double ScaleFunction::Wpp(double x) const {
  if (x < 0.0) return 0.0;
  if (method_ == ScaleMethod::NumericInversion) {
    // Second difference amplifies inversion noise by 1/h^2; a wider step than
    // Wp's trades truncation error for that noise.
    const double h = 2e-3 * (1.0 + std::abs(x));
    const double x0 = std::max(x, h + 1e-12);
    return (numeric_W(x0 + h) - 2.0 * numeric_W(x0) + numeric_W(x0 - h)) /
           (h * h);
  }
  long double acc = 0.0L;
  for (const auto& [w, l] : terms_)
    acc += static_cast<long double>(w) * l * l *
           std::exp(static_cast<long double>(l * x));
  return static_cast<double>(acc);
}

double ScaleFunction::Z(double x) const {
  if (x <= 0.0) return 1.0;
  if (method_ == ScaleMethod::NumericInversion) return numeric_Z(x);
  long double acc = 1.0L;
  for (const auto& [w, l] : terms_) {
    if (std::abs(l) > 1e-300)
      acc += static_cast<long double>(q_) * w *
             (std::exp(static_cast<long double>(l * x)) - 1.0L) / l;
    else
      acc += static_cast<long double>(q_) * w * x;
  }
  return static_cast<double>(acc);
}

double ScaleFunction::numeric_W(double x) const {
  const LevyModel& m = *model();
  const double c = phi_;
  const double q = q_;
  // invert G(s) = 1/(psi(s + c) - q); the shift keeps the contour right of
  // the dominant zero of psi - q and the growth factor is restored outside
  const double inverted = talbot(
      [&](cplx s) { return 1.0 / (laplace_exponent(m, s + c) - q); },
      std::max(x, 1e-8));
  return std::exp(c * x) * inverted;
}

double ScaleFunction::numeric_Z(double x) const {
  const LevyModel& m = *model();
  const double c = phi_;
  const double q = q_;
  const double inverted = talbot(
      [&](cplx s) {
        const cplx l = s + c;
        return laplace_exponent_over_lambda(m, l) /
               (laplace_exponent(m, l) - q);
      },
      std::max(x, 1e-8));
  return std::exp(c * x) * inverted;
}

double ScaleFunction::transform_residual() const {
  // probe the identity (psi(l) - q) * integral e^{-l x} W dx = 1 a bit right
  // of Phi(q); the integral is computed from the representation itself
  double worst = 0.0;
  for (double mult : {1.5, 2.5, 4.0}) {
    const double l = (phi_ + 1.0) * mult;
    double integral = 0.0;
    if (method_ == ScaleMethod::ClosedForm) {
      for (const auto& [w, root] : terms_) integral += w / (l - root);
    } else {
      // truncate when e^{(phi - l) x} is negligible
      const double span = 40.0 / std::max(l - phi_, 0.1);
      integral = numerics::integrate(
          [&](double x) { return std::exp(-l * x) * W(x); }, 0.0, span, 1e-12);
    }
    const double lhs = (laplace_exponent(*model(), l) - q_) * integral;
    worst = std::max(worst, std::abs(lhs - 1.0));
  }
  return worst;
}

}  // namespace levystop::scale
