#include "levystop/levy_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "levystop/errors.hpp"
#include "levystop/numerics.hpp"

namespace levystop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& what) {
  if (!cond) throw UsageError("model: " + what);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Margin under which a point is considered to sit on a strip endpoint.
double strip_margin(double endpoint) {
  return 1e-9 * std::max(1.0, std::abs(endpoint));
}

}  // namespace

LevyModel::LevyModel(LevyFamily fam, double drift, double sigma,
                     double lambda_j, double p, double eta_plus,
                     double eta_minus)
    : family_(fam),
      drift_(drift),
      sigma_(sigma),
      lambda_j_(lambda_j),
      p_(p),
      eta_plus_(eta_plus),
      eta_minus_(eta_minus) {
  validate();
}

void LevyModel::validate() const {
  // absent jump sides carry an infinite mark rate; everything else is finite
  for (double v : {drift_, sigma_, lambda_j_, p_})
    require(std::isfinite(v), "parameters must be finite");
  require(!std::isnan(eta_plus_) && !std::isnan(eta_minus_),
          "parameters must be finite");
  switch (family_) {
    case LevyFamily::BrownianDrift:
      require(sigma_ > 0.0, "brownian_drift requires sigma > 0");
      break;
    case LevyFamily::JumpDiffusionExp:
      require(sigma_ >= 0.0, "sigma must be >= 0");
      require(lambda_j_ >= 0.0, "lambda_j must be >= 0");
      require(p_ >= 0.0 && p_ <= 1.0, "p must lie in [0, 1]");
      require(eta_plus_ > 0.0 && eta_minus_ > 0.0 &&
                  std::isfinite(eta_plus_) && std::isfinite(eta_minus_),
              "jump mark rates must be positive and finite");
      if (sigma_ == 0.0) {
        // No Gaussian part: rule out monotone paths.
        require(lambda_j_ > 0.0,
                "sigma = 0 with no jumps gives a deterministic drift");
        const bool up_jumps = p_ > 0.0;
        const bool down_jumps = p_ < 1.0;
        require((up_jumps && down_jumps) || (up_jumps && drift_ < 0.0) ||
                    (down_jumps && drift_ > 0.0),
                "sigma = 0 with one-sided jumps and same-signed drift gives "
                "monotone paths");
      }
      break;
    case LevyFamily::SpectrallyNegativeCL:
      require(sigma_ > 0.0, "spectrally_negative_cl requires sigma > 0");
      require(lambda_j_ >= 0.0, "lambda_j must be >= 0");
      require(eta_minus_ > 0.0 && std::isfinite(eta_minus_),
              "eta_minus must be positive and finite");
      break;
    case LevyFamily::BoundedVariationSN:
      require(drift_ > 0.0,
              "bounded_variation_sn requires drift d > 0 (paths are monotone "
              "otherwise)");
      require(lambda_j_ > 0.0, "bounded_variation_sn requires lambda_j > 0");
      require(eta_minus_ > 0.0 && std::isfinite(eta_minus_),
              "eta_minus must be positive and finite");
      break;
  }
}

LevyModel LevyModel::brownian_drift(double mu, double sigma) {
  return LevyModel(LevyFamily::BrownianDrift, mu, sigma, 0.0, 0.0, kInf, kInf);
}

LevyModel LevyModel::jump_diffusion_exp(double mu, double sigma,
                                        double lambda_j, double p,
                                        double eta_plus, double eta_minus) {
  return LevyModel(LevyFamily::JumpDiffusionExp, mu, sigma, lambda_j, p,
                   eta_plus, eta_minus);
}

LevyModel LevyModel::spectrally_negative_cl(double mu, double sigma,
                                            double lambda_j,
                                            double eta_minus) {
  return LevyModel(LevyFamily::SpectrallyNegativeCL, mu, sigma, lambda_j, 0.0,
                   kInf, eta_minus);
}

LevyModel LevyModel::bounded_variation_sn(double d, double lambda_j,
                                          double eta_minus) {
  return LevyModel(LevyFamily::BoundedVariationSN, d, 0.0, lambda_j, 0.0, kInf,
                   eta_minus);
}

bool LevyModel::spectrally_negative() const noexcept {
  switch (family_) {
    case LevyFamily::BrownianDrift:
      return true;  // no jumps at all
    case LevyFamily::JumpDiffusionExp:
      return !(lambda_j_ > 0.0 && p_ > 0.0);
    case LevyFamily::SpectrallyNegativeCL:
    case LevyFamily::BoundedVariationSN:
      return true;
  }
  return true;
}

Strip LevyModel::strip() const noexcept {
  switch (family_) {
    case LevyFamily::BrownianDrift:
      return {-kInf, kInf};
    case LevyFamily::JumpDiffusionExp:
      return {lambda_j_ > 0.0 && p_ < 1.0 ? -eta_minus_ : -kInf,
              lambda_j_ > 0.0 && p_ > 0.0 ? eta_plus_ : kInf};
    case LevyFamily::SpectrallyNegativeCL:
    case LevyFamily::BoundedVariationSN:
      return {lambda_j_ > 0.0 ? -eta_minus_ : -kInf, kInf};
  }
  return {-kInf, kInf};
}

double LevyModel::mean_rate() const noexcept {
  double jumps = 0.0;
  if (lambda_j_ > 0.0)
    jumps = lambda_j_ * (p_ / eta_plus_ - (1.0 - p_) / eta_minus_);
  return drift_ + jumps;
}

std::string LevyModel::family_name() const {
  switch (family_) {
    case LevyFamily::BrownianDrift:
      return "brownian_drift";
    case LevyFamily::JumpDiffusionExp:
      return "jump_diffusion_exp";
    case LevyFamily::SpectrallyNegativeCL:
      return "spectrally_negative_cl";
    case LevyFamily::BoundedVariationSN:
      return "bounded_variation_sn";
  }
  return "?";
}

std::string LevyModel::describe() const {
  std::ostringstream os;
  os << family_name() << "(";
  switch (family_) {
    case LevyFamily::BrownianDrift:
      os << "mu=" << drift_ << ", sigma=" << sigma_;
      break;
    case LevyFamily::JumpDiffusionExp:
      os << "mu=" << drift_ << ", sigma=" << sigma_ << ", lambda_j=" << lambda_j_
         << ", p=" << p_ << ", eta_plus=" << eta_plus_
         << ", eta_minus=" << eta_minus_;
      break;
    case LevyFamily::SpectrallyNegativeCL:
      os << "mu=" << drift_ << ", sigma=" << sigma_ << ", lambda_j=" << lambda_j_
         << ", eta_minus=" << eta_minus_;
      break;
    case LevyFamily::BoundedVariationSN:
      os << "d=" << drift_ << ", lambda_j=" << lambda_j_
         << ", eta_minus=" << eta_minus_;
      break;
  }
  os << ")";
  return os.str();
}

nlohmann::ordered_json LevyModel::to_json() const {
  nlohmann::ordered_json params;
  switch (family_) {
    case LevyFamily::BrownianDrift:
      params = {{"mu", drift_}, {"sigma", sigma_}};
      break;
    case LevyFamily::JumpDiffusionExp:
      params = {{"mu", drift_},          {"sigma", sigma_},
                {"lambda_j", lambda_j_}, {"p", p_},
                {"eta_plus", eta_plus_}, {"eta_minus", eta_minus_}};
      break;
    case LevyFamily::SpectrallyNegativeCL:
      params = {{"mu", drift_},
                {"sigma", sigma_},
                {"lambda_j", lambda_j_},
                {"eta_minus", eta_minus_}};
      break;
    case LevyFamily::BoundedVariationSN:
      params = {{"d", drift_},
                {"lambda_j", lambda_j_},
                {"eta_minus", eta_minus_}};
      break;
  }
  return {{"family", family_name()}, {"params", params}};
}

namespace {

double get_param(const nlohmann::json& params, const std::string& key,
                 const std::string& family) {
  auto it = params.find(key);
  if (it == params.end())
    throw UsageError("model: family '" + family + "' requires parameter '" +
                     key + "'");
  if (!it->is_number())
    throw UsageError("model: parameter '" + key + "' must be a number");
  return it->get<double>();
}

void reject_unknown(const nlohmann::json& params,
                    std::initializer_list<const char*> known,
                    const std::string& family) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw UsageError("model: unknown parameter '" + it.key() +
                       "' for family '" + family + "'");
  }
}

}  // namespace

LevyModel LevyModel::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw UsageError("model: expected {\"family\": ..., \"params\": {...}}");
  const std::string family = j["family"].get<std::string>();
  const nlohmann::json params =
      j.contains("params") ? j["params"] : nlohmann::json::object();
  if (!params.is_object()) throw UsageError("model: 'params' must be an object");

  if (family == "brownian_drift") {
    reject_unknown(params, {"mu", "sigma"}, family);
    return brownian_drift(get_param(params, "mu", family),
                          get_param(params, "sigma", family));
  }
  if (family == "jump_diffusion_exp") {
    reject_unknown(params,
                   {"mu", "sigma", "lambda_j", "p", "eta_plus", "eta_minus"},
                   family);
    return jump_diffusion_exp(get_param(params, "mu", family),
                              get_param(params, "sigma", family),
                              get_param(params, "lambda_j", family),
                              get_param(params, "p", family),
                              get_param(params, "eta_plus", family),
                              get_param(params, "eta_minus", family));
  }
  if (family == "spectrally_negative_cl") {
    reject_unknown(params, {"mu", "sigma", "lambda_j", "eta_minus"}, family);
    return spectrally_negative_cl(get_param(params, "mu", family),
                                  get_param(params, "sigma", family),
                                  get_param(params, "lambda_j", family),
                                  get_param(params, "eta_minus", family));
  }
  if (family == "bounded_variation_sn") {
    reject_unknown(params, {"d", "lambda_j", "eta_minus"}, family);
    return bounded_variation_sn(get_param(params, "d", family),
                                get_param(params, "lambda_j", family),
                                get_param(params, "eta_minus", family));
  }
  throw UsageError(
      "model: unknown family '" + family +
      "' (expected one of brownian_drift, jump_diffusion_exp, "
      "spectrally_negative_cl, bounded_variation_sn)");
}

LevyModel LevyModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("model: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("model: '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::uint64_t LevyModel::hash() const {
  std::string repr = family_name();
  for (double v : {drift_, sigma_, lambda_j_, p_}) repr += "," + fmt(v);
  // Infinite mark rates (absent jump side) serialize as "inf".
  repr += "," + fmt(eta_plus_) + "," + fmt(eta_minus_);
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : repr) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Horizon::Horizon(double q_) : q(q_) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw DomainError("horizon: discount rate q must be positive and finite");
}

// ---------------------------------------------------------------------------
// Laplace exponent
// ---------------------------------------------------------------------------

namespace {

void check_strip(const LevyModel& m, double lambda) {
  const Strip s = m.strip();
  if (std::isfinite(s.hi) && lambda >= s.hi - strip_margin(s.hi))
    throw DomainError("laplace_exponent: lambda = " + fmt(lambda) +
                      " is at or beyond the upper strip endpoint " + fmt(s.hi));
  if (std::isfinite(s.lo) && lambda <= s.lo + strip_margin(s.lo))
    throw DomainError("laplace_exponent: lambda = " + fmt(lambda) +
                      " is at or beyond the lower strip endpoint " + fmt(s.lo));
}

}  // namespace

double laplace_exponent(const LevyModel& m, double lambda) {
  check_strip(m, lambda);
  const double mu = m.linear_drift();
  const double s2 = m.gaussian_sigma() * m.gaussian_sigma();
  double psi = mu * lambda + 0.5 * s2 * lambda * lambda;
  if (m.has_jumps()) {
    const double p = m.up_jump_prob();
    double mgf = 0.0;
    if (p > 0.0) mgf += p * m.eta_plus() / (m.eta_plus() - lambda);
    if (p < 1.0) mgf += (1.0 - p) * m.eta_minus() / (m.eta_minus() + lambda);
    psi += m.jump_intensity() * (mgf - 1.0);
  }
  return psi;
}

double laplace_exponent_derivative(const LevyModel& m, double lambda) {
  check_strip(m, lambda);
  const double s2 = m.gaussian_sigma() * m.gaussian_sigma();
  double d = m.linear_drift() + s2 * lambda;
  if (m.has_jumps()) {
    const double p = m.up_jump_prob();
    double dm = 0.0;
    if (p > 0.0) {
      const double den = m.eta_plus() - lambda;
      dm += p * m.eta_plus() / (den * den);
    }
    if (p < 1.0) {
      const double den = m.eta_minus() + lambda;
      dm -= (1.0 - p) * m.eta_minus() / (den * den);
    }
    d += m.jump_intensity() * dm;
  }
  return d;
}

std::complex<double> laplace_exponent(const LevyModel& m,
                                      std::complex<double> lambda) {
  const double mu = m.linear_drift();
  const double s2 = m.gaussian_sigma() * m.gaussian_sigma();
  std::complex<double> psi = mu * lambda + 0.5 * s2 * lambda * lambda;
  if (m.has_jumps()) {
    const double p = m.up_jump_prob();
    std::complex<double> mgf = 0.0;
    if (p > 0.0) mgf += p * m.eta_plus() / (m.eta_plus() - lambda);
    if (p < 1.0) mgf += (1.0 - p) * m.eta_minus() / (m.eta_minus() + lambda);
    psi += m.jump_intensity() * (mgf - 1.0);
  }
  return psi;
}

std::complex<double> laplace_exponent_over_lambda(const LevyModel& m,
                                                  std::complex<double> lambda) {
  const double mu = m.linear_drift();
  const double s2 = m.gaussian_sigma() * m.gaussian_sigma();
  std::complex<double> r = mu + 0.5 * s2 * lambda;
  if (m.has_jumps()) {
    const double p = m.up_jump_prob();
    std::complex<double> part = 0.0;
    // (eta+/(eta+ - l) - 1)/l = 1/(eta+ - l); (eta-/(eta- + l) - 1)/l = -1/(eta- + l)
    if (p > 0.0) part += p / (m.eta_plus() - lambda);
    if (p < 1.0) part -= (1.0 - p) / (m.eta_minus() + lambda);
    r += m.jump_intensity() * part;
  }
  return r;
}

double psi_inverse_right(const LevyModel& m, double q) {
  if (q < 0.0 || !std::isfinite(q))
    throw DomainError("psi_inverse_right: q must be >= 0 and finite");
  if (q == 0.0 && m.mean_rate() >= 0.0) return 0.0;

  const Strip s = m.strip();
  const double cap = std::isfinite(s.hi) ? s.hi - 2.0 * strip_margin(s.hi)
                                         : std::numeric_limits<double>::max();
  // psi is convex with psi(0) = 0; the largest root of psi = q lies strictly
  // right of the mean-rate zero expansion point.
  double lo = 0.0;
  if (q == 0.0) {
    // mean rate < 0: positive root; start searching past the minimum.
    double probe = 1e-8;
    while (probe < cap && laplace_exponent_derivative(m, probe) < 0.0)
      probe = std::min(probe * 4.0, cap);
    lo = probe;
  }
  auto g = [&](double lam) { return laplace_exponent(m, lam) - q; };
  double hi = std::min(lo > 0.0 ? lo * 2.0 : 1.0, cap);
  int guard = 0;
  while (g(hi) < 0.0) {
    if (hi >= cap || ++guard > 200)
      throw NumericalError("psi_inverse_right: failed to bracket the root");
    hi = std::min(hi * 2.0, cap);
  }
  return numerics::newton_bracketed(
      g, [&](double lam) { return laplace_exponent_derivative(m, lam); }, lo,
      hi, 0.5 * (lo + hi), 1e-14 * std::max(1.0, hi));
}

// ---------------------------------------------------------------------------
// Moment and condition checks
// ---------------------------------------------------------------------------

bool power_moment_finite(const UpTail& tail, double nu) {
  if (!(nu > 0.0)) throw DomainError("power_moment_finite: nu must be positive");
  if (std::holds_alternative<std::monostate>(tail)) return true;
  if (const auto* e = std::get_if<ExponentialUpTail>(&tail)) {
    if (!(e->rate > 0.0))
      throw DomainError("power_moment_finite: exponential tail rate must be positive");
    return true;  // all power moments of an exponential tail are finite
  }
  const auto& par = std::get<ParetoUpTail>(tail);
  if (!(par.alpha > 0.0))
    throw DomainError("power_moment_finite: pareto tail index must be positive");
  return nu < par.alpha;
}

UpTail up_tail(const LevyModel& m) {
  if (m.has_jumps() && m.up_jump_prob() > 0.0)
    return ExponentialUpTail{m.eta_plus()};
  return std::monostate{};
}

bool power_moment_finite(const LevyModel& m, double nu) {
  return power_moment_finite(up_tail(m), nu);
}

SsConditions check_ss_conditions(const LevyModel& m, double q) {
  SsConditions c;
  c.q = q;
  const Strip s = m.strip();
  c.psi_at_one = (s.hi > 1.0 + strip_margin(1.0)) ? laplace_exponent(m, 1.0) : kInf;
  c.bounded_variation = m.bounded_variation();
  c.drift_d = m.bounded_variation() ? m.linear_drift() : kInf;
  c.discount_dominates_psi1 = q > std::max(c.psi_at_one, 0.0);
  c.discount_below_drift = !c.bounded_variation || q < c.drift_d;
  return c;
}

std::string SsConditions::violation() const {
  if (ok()) return "";
  std::ostringstream os;
  if (!discount_dominates_psi1)
    os << "q > max(psi(1), 0) fails: q = " << q << ", psi(1) = " << psi_at_one
       << "; ";
  if (!discount_below_drift)
    os << "discount must stay below the drift (q < d) on bounded variation "
          "paths: q = "
       << q << ", d = " << drift_d << "; ";
  std::string out = os.str();
  if (out.size() >= 2) out.resize(out.size() - 2);
  return out;
}

}  // namespace levystop
