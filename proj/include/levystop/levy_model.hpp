#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>

#include "json.hpp"

namespace levystop {

// Model catalog.  Conventions:
//   psi(l) = log E[exp(l * X_1)]  (Laplace exponent, l real in the strip)
//   eta_minus / eta_plus are the rates of the exponential jump marks, so a
//   down jump has density eta_minus * exp(-eta_minus * z), z > 0.
enum class LevyFamily {
  BrownianDrift,        // mu * t + sigma * B_t
  JumpDiffusionExp,     // + compound Poisson, two-sided exponential marks
  SpectrallyNegativeCL, // Brownian part + down-exponential jumps only
  BoundedVariationSN,   // d * t - compound Poisson with exponential marks
};

// Open interval of l where E[exp(l X_1)] is finite.
struct Strip {
  double lo;
  double hi;
};

class LevyModel {
 public:
  static LevyModel brownian_drift(double mu, double sigma);
  static LevyModel jump_diffusion_exp(double mu, double sigma, double lambda_j,
                                      double p, double eta_plus,
                                      double eta_minus);
  static LevyModel spectrally_negative_cl(double mu, double sigma,
                                          double lambda_j, double eta_minus);
  static LevyModel bounded_variation_sn(double d, double lambda_j,
                                        double eta_minus);

  static LevyModel from_json(const nlohmann::json& j);
  static LevyModel load(const std::string& path);
  nlohmann::ordered_json to_json() const;

  LevyFamily family() const noexcept { return family_; }
  std::string family_name() const;
  std::string describe() const;

  // Unified dynamics accessors (zero where a component is absent).
  double linear_drift() const noexcept { return drift_; }       // mu, or d for BV
  double gaussian_sigma() const noexcept { return sigma_; }
  double jump_intensity() const noexcept { return lambda_j_; }
  double up_jump_prob() const noexcept { return p_; }
  double eta_plus() const noexcept { return eta_plus_; }
  double eta_minus() const noexcept { return eta_minus_; }

  bool has_jumps() const noexcept { return lambda_j_ > 0.0; }
  bool spectrally_negative() const noexcept;
  bool bounded_variation() const noexcept { return sigma_ == 0.0; }

  Strip strip() const noexcept;
  double mean_rate() const noexcept;  // E[X_1] = psi'(0)

  // Stable content hash of the canonical serialization; identifies a model in
  // persisted sample files.
  std::uint64_t hash() const;

 private:
  LevyModel(LevyFamily fam, double drift, double sigma, double lambda_j,
            double p, double eta_plus, double eta_minus);
  void validate() const;

  LevyFamily family_;
  double drift_;
  double sigma_;
  double lambda_j_;
  double p_;
  double eta_plus_;
  double eta_minus_;
};

// Exponentially distributed killing time with rate q > 0, independent of the
// process.  Wrapping the bare double keeps discount rates from being confused
// with thresholds or maturities in call sites.
struct Horizon {
  explicit Horizon(double q_);
  double q;
};

// psi on the real strip; throws DomainError outside the open strip (relative
// margin 1e-9 at each finite endpoint).
double laplace_exponent(const LevyModel& m, double lambda);

// psi'(lambda) on the same domain.
double laplace_exponent_derivative(const LevyModel& m, double lambda);

// Analytic continuation of psi to complex lambda; no domain checks.  Used by
// transform inversion, which evaluates left of the strip.
std::complex<double> laplace_exponent(const LevyModel& m,
                                      std::complex<double> lambda);

// psi(lambda) / lambda with the removable singularity at 0 eliminated
// algebraically, valid for complex lambda away from the mark-rate poles.
std::complex<double> laplace_exponent_over_lambda(const LevyModel& m,
                                                  std::complex<double> lambda);

// Largest real root of psi(l) = q, the right inverse usually written Phi(q).
// Defined for q >= 0; q = 0 returns 0 when the mean rate is >= 0.
double psi_inverse_right(const LevyModel& m, double q);

// --- positive-tail power moments -------------------------------------------
// E[(X_1 v 0)^nu] < infinity is a precondition of the power-payoff solver.
// Every catalog family has an exponential (or absent) up-tail, so the check
// is immediate; the variant hook exists so heavier tails can be reasoned
// about and the precondition path stays testable.

struct ExponentialUpTail {
  double rate;  // > 0
};
struct ParetoUpTail {
  double alpha;  // tail index: P(J > z) ~ z^{-alpha}
};
using UpTail = std::variant<std::monostate, ExponentialUpTail, ParetoUpTail>;

bool power_moment_finite(const UpTail& tail, double nu);
bool power_moment_finite(const LevyModel& m, double nu);
UpTail up_tail(const LevyModel& m);

// --- standing assumptions of the reflected (Russian) problem ----------------

struct SsConditions {
  double q = 0.0;
  double psi_at_one = 0.0;   // +inf when E[exp(X_1)] diverges
  double drift_d = 0.0;      // only meaningful when bounded_variation
  bool bounded_variation = false;
  bool discount_dominates_psi1 = false;  // q > max(psi(1), 0)
  bool discount_below_drift = true;      // q < d, trivially true otherwise

  bool ok() const noexcept {
    return discount_dominates_psi1 && discount_below_drift;
  }
  std::string violation() const;
};

SsConditions check_ss_conditions(const LevyModel& m, double q);

}  // namespace levystop
