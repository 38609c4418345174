#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levystop/levy_model.hpp"

namespace levystop::fluct {

enum class ExtremeSide { Supremum, Infimum };

struct ValueWithError {
  double value = 0.0;
  double std_error = 0.0;  // 0 for closed-form results
};

// Controls for the simulation fallback of extrema_law.  The seed has no
// default: empirical laws are only reproducible when the caller pins one.
struct SampleConfig {
  std::size_t n_samples = 1000000;
  std::optional<std::uint64_t> seed;
  double dt_cap = 1e-3;  // per-path step is min(dt_cap, T/1000)
  unsigned threads = 0;
};

// Law of the running supremum (>= 0) or infimum (<= 0) of the process at an
// independent Exp(q) time.  Either a one-parameter exponential in closed form
// or an empirical sample cloud.
class ExtremaLaw {
 public:
  ExtremeSide side() const noexcept { return side_; }
  double q() const noexcept { return q_; }
  bool exact() const noexcept { return exact_rate_.has_value(); }

  // Rate r of the exponential law of |M|; throws unless exact().
  double exact_rate() const;

  // Sample values of M itself (negative for the infimum side), in generation
  // order; throws when exact().
  const std::vector<double>& samples() const;
  std::uint64_t seed() const noexcept { return seed_; }
  double dt_cap() const noexcept { return dt_cap_; }

  static ExtremaLaw exact_exponential(ExtremeSide side, double q, double rate);
  static ExtremaLaw empirical(ExtremeSide side, double q,
                              std::vector<double> samples, std::uint64_t seed,
                              double dt_cap);

 private:
  ExtremaLaw() = default;
  ExtremeSide side_ = ExtremeSide::Supremum;
  double q_ = 0.0;
  std::optional<double> exact_rate_;
  std::shared_ptr<const std::vector<double>> samples_;
  std::uint64_t seed_ = 0;
  double dt_cap_ = 0.0;
};

// Wiener-Hopf factor dispatch.  Closed forms: both sides for Brownian motion
// (quadratic roots of psi = q), the supremum when the process has no positive
// jumps (rate Phi(q)), the infimum when it has no negative jumps (mirror).
// Everything else falls back to simulating extrema at an Exp(q) horizon,
// which requires config.seed.
ExtremaLaw extrema_law(const LevyModel& m, Horizon h, ExtremeSide side,
                       const SampleConfig& config = {});

// E[exp(beta M)] for the law's variable M.  Exact laws check integrability
// (beta < rate on the supremum side, beta > -rate on the infimum side).
ValueWithError exp_functional(const ExtremaLaw& law, double beta);

// E[f(M); M < cutoff] (Below) or E[f(M); M > cutoff] (Above).  For exact laws
// f is integrated against the exponential density after a divergence probe of
// the far tail; empirical laws take the sample mean.
enum class TailSide { Below, Above };
ValueWithError truncated_functional(const ExtremaLaw& law,
                                    const std::function<double(double)>& f,
                                    double cutoff, TailSide tail);

// E_x[e^{-q tau_y} e^{beta X_tau}; tau_y < inf] for the first passage below y
// starting from x, computed through the infimum law:
//   e^{beta x} * E[e^{beta M}; M < y - x] / E[e^{beta M}].
// Requires beta >= 0 and an Infimum-side law.
ValueWithError first_passage_transform(const ExtremaLaw& inf_law, double beta,
                                       double x, double y);
ValueWithError first_passage_transform(const LevyModel& m, Horizon h,
                                       double beta, double x, double y,
                                       const SampleConfig& config = {});

// Persistence of empirical laws: <stem>.csv holds one sample per line,
// <stem>.json holds side/q/seed/step metadata and the model hash.  Loading
// verifies the hash when the expected model is supplied.
void save_extrema_law(const ExtremaLaw& law, const LevyModel& m,
                      const std::string& stem);
ExtremaLaw load_extrema_law(const std::string& stem,
                            const LevyModel* expected_model = nullptr);

}  // namespace levystop::fluct
