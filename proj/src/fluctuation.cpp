#include "levystop/fluctuation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"
#include "levystop/errors.hpp"
#include "levystop/numerics.hpp"
#include "levystop/rng.hpp"
#include "levystop/simulation.hpp"

namespace levystop::fluct {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// ExtremaLaw
// ---------------------------------------------------------------------------

double ExtremaLaw::exact_rate() const {
  if (!exact_rate_)
    throw UsageError("extrema law: exact_rate() called on an empirical law");
  return *exact_rate_;
}

const std::vector<double>& ExtremaLaw::samples() const {
  if (!samples_)
    throw UsageError("extrema law: samples() called on an exact law");
  return *samples_;
}

ExtremaLaw ExtremaLaw::exact_exponential(ExtremeSide side, double q,
                                         double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw DomainError("extrema law: exponential rate must be positive");
  ExtremaLaw law;
  law.side_ = side;
  law.q_ = q;
  law.exact_rate_ = rate;
  return law;
}

ExtremaLaw ExtremaLaw::empirical(ExtremeSide side, double q,
                                 std::vector<double> samples,
                                 std::uint64_t seed, double dt_cap) {
  if (samples.size() < 2)
    throw UsageError("extrema law: need at least 2 samples");
  const bool sup = side == ExtremeSide::Supremum;
  for (double v : samples)
    if (!std::isfinite(v) || (sup ? v < 0.0 : v > 0.0))
      throw UsageError("extrema law: samples must lie on the side of 0 "
                       "matching the extreme");
  ExtremaLaw law;
  law.side_ = side;
  law.q_ = q;
  law.samples_ = std::make_shared<const std::vector<double>>(std::move(samples));
  law.seed_ = seed;
  law.dt_cap_ = dt_cap;
  return law;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

bool has_up_jumps(const LevyModel& m) {
  return m.has_jumps() && m.up_jump_prob() > 0.0;
}
bool has_down_jumps(const LevyModel& m) {
  return m.has_jumps() && m.up_jump_prob() < 1.0;
}

// Largest root of psi(-l) = q over l > 0, i.e. Phi(q) of the mirrored
// process -X.  Used for the infimum law of processes without negative jumps.
double mirrored_right_inverse(const LevyModel& m, double q) {
  const Strip s = m.strip();
  const double cap = std::isfinite(s.lo)
                         ? -s.lo - 2e-9 * std::max(1.0, -s.lo)
                         : std::numeric_limits<double>::max();
  auto g = [&](double l) { return laplace_exponent(m, -l) - q; };
  double hi = std::min(1.0, cap);
  int guard = 0;
  while (g(hi) < 0.0) {
    if (hi >= cap || ++guard > 200)
      throw NumericalError("extrema law: failed to bracket the mirrored root");
    hi = std::min(hi * 2.0, cap);
  }
  return numerics::newton_bracketed(
      g, [&](double l) { return -laplace_exponent_derivative(m, -l); }, 0.0,
      hi, 0.5 * hi, 1e-14 * std::max(1.0, hi));
}

// Tracks the running extremes of one path at segment endpoints and post-jump
// values; exact for sigma = 0 since segments are monotone lines.
struct ExtremesVisitor {
  double lo = 0.0;
  double hi = 0.0;
  bool on_segment(double, double, double, double x1) {
    lo = std::min(lo, x1);
    hi = std::max(hi, x1);
    return true;
  }
  bool on_jump(double, double, double x1) {
    lo = std::min(lo, x1);
    hi = std::max(hi, x1);
    return true;
  }
};

std::vector<double> simulate_extrema(const LevyModel& m, double q,
                                     ExtremeSide side,
                                     const SampleConfig& cfg) {
  if (!cfg.seed)
    throw UsageError(
        "extrema law: this model/side has no closed-form factor; simulation "
        "requires an explicit seed");
  if (cfg.n_samples < 2)
    throw UsageError("extrema law: n_samples must be at least 2");

  std::vector<double> out(cfg.n_samples);
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kChunk = 1024;
  const std::size_t n_chunks = (cfg.n_samples - 1) / kChunk + 1;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const std::size_t lo = c * kChunk;
      const std::size_t hi = std::min(lo + kChunk, cfg.n_samples);
      for (std::size_t i = lo; i < hi; ++i) {
        rng::PathRng rng(*cfg.seed, i);
        const double horizon = rng.exponential(q);  // kill time, drawn first
        const double dt = std::min(cfg.dt_cap, horizon / 1000.0);
        ExtremesVisitor vis;
        sim::walk_path(m, rng, dt, horizon, vis);
        out[i] = side == ExtremeSide::Supremum ? vis.hi : vis.lo;
      }
    }
  };
  unsigned t = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  t = static_cast<unsigned>(std::min<std::size_t>(t, n_chunks));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace

ExtremaLaw extrema_law(const LevyModel& m, Horizon h, ExtremeSide side,
                       const SampleConfig& config) {
  const double q = h.q;
  if (side == ExtremeSide::Supremum) {
    if (!has_up_jumps(m))
      return ExtremaLaw::exact_exponential(side, q, psi_inverse_right(m, q));
  } else {
    if (!has_down_jumps(m))
      return ExtremaLaw::exact_exponential(side, q, mirrored_right_inverse(m, q));
  }
  return ExtremaLaw::empirical(side, q, simulate_extrema(m, q, side, config),
                               *config.seed, config.dt_cap);
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

namespace {

// Mean and standard error of g over the sample cloud.
template <class G>
ValueWithError sample_mean(const std::vector<double>& xs, G&& g) {
  long double s = 0.0L, s2 = 0.0L;
  for (double x : xs) {
    const long double v = g(x);
    s += v;
    s2 += v * v;
  }
  const long double n = static_cast<long double>(xs.size());
  const long double mean = s / n;
  const long double var = std::max(0.0L, (s2 - n * mean * mean) / (n - 1));
  return {static_cast<double>(mean),
          static_cast<double>(std::sqrt(var / n))};
}

// Integral of f against the exponential density over |M| in [a, b], where b
// may be +inf.  `to_m` maps |M| to the signed variable.  The far tail is
// probed on a geometric ladder first: if f grows faster than the density
// decays the functional does not exist and we refuse rather than truncate.
double exact_integral(double rate, double a, double b,
                      const std::function<double(double)>& f, bool negate) {
  auto integrand = [&](double u) {
    const double m = negate ? -u : u;
    return f(m) * rate * std::exp(-rate * u);
  };
  if (std::isfinite(b)) {
    if (b <= a) return 0.0;
    return numerics::integrate(integrand, a, b, 1e-13);
  }
  // probe ladder for decay of the integrand beyond a
  double peak = std::abs(integrand(a));
  double cut = a;
  bool settled = false;
  double prev = peak;
  for (int j = 0; j <= 80; ++j) {
    const double s = a + std::ldexp(1.0 / rate, j - 10);
    const double g = std::abs(integrand(s));
    peak = std::max(peak, g);
    if (g <= 1e-16 * std::max(peak, 1e-300) && g <= prev) {
      cut = s;
      settled = true;
      break;
    }
    prev = g;
  }
  if (!settled)
    throw DomainError(
        "functional does not decay against the exponential extreme law; "
        "the expectation diverges");
  return numerics::integrate(integrand, a, cut, 1e-13 * std::max(1.0, peak));
}

}  // namespace

ValueWithError exp_functional(const ExtremaLaw& law, double beta) {
  if (!std::isfinite(beta)) throw DomainError("exp_functional: beta must be finite");
  const bool sup = law.side() == ExtremeSide::Supremum;
  if (law.exact()) {
    const double r = law.exact_rate();
    // E[e^{beta M}] with |M| ~ Exp(r)
    const double margin = 1e-12 * std::max(1.0, r);
    if (sup && beta >= r - margin)
      throw DomainError("exp_functional: E[e^{beta sup}] diverges for beta >= rate");
    if (!sup && beta <= -r + margin)
      throw DomainError("exp_functional: E[e^{beta inf}] diverges for beta <= -rate");
    return {sup ? r / (r - beta) : r / (r + beta), 0.0};
  }
  return sample_mean(law.samples(),
                     [beta](double m) { return std::exp(beta * m); });
}

ValueWithError truncated_functional(const ExtremaLaw& law,
                                    const std::function<double(double)>& f,
                                    double cutoff, TailSide tail) {
  const bool sup = law.side() == ExtremeSide::Supremum;
  if (law.exact()) {
    const double r = law.exact_rate();
    // translate the region on M to a region on |M|
    double a = 0.0, b = kInf;
    if (sup) {
      if (tail == TailSide::Above)
        a = std::max(cutoff, 0.0);
      else
        b = std::max(cutoff, 0.0);
    } else {
      // M <= 0, |M| = -M
      if (tail == TailSide::Below)
        a = std::max(-cutoff, 0.0);
      else
        b = std::max(-cutoff, 0.0);
    }
    return {exact_integral(r, a, b, f, /*negate=*/!sup), 0.0};
  }
  auto g = [&](double m) {
    const bool in = tail == TailSide::Below ? m < cutoff : m > cutoff;
    return in ? f(m) : 0.0;
  };
  return sample_mean(law.samples(), g);
}

ValueWithError first_passage_transform(const ExtremaLaw& inf_law, double beta,
                                       double x, double y) {
  if (inf_law.side() != ExtremeSide::Infimum)
    throw UsageError("first_passage_transform: needs the infimum law");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw DomainError("first_passage_transform: beta must be >= 0");
  const double c = y - x;  // event is M < c
  const double scale = std::exp(beta * x);
  if (inf_law.exact()) {
    const double r = inf_law.exact_rate();
    // E[e^{beta M}; M < c] / E[e^{beta M}] = e^{(r+beta) min(c,0)}
    return {scale * std::exp((r + beta) * std::min(c, 0.0)), 0.0};
  }
  const std::vector<double>& ms = inf_law.samples();
  long double sa = 0.0L, sb = 0.0L;
  for (double m : ms) {
    const long double e = std::exp(beta * m);
    sb += e;
    if (m < c) sa += e;
  }
  const long double n = static_cast<long double>(ms.size());
  const long double abar = sa / n, bbar = sb / n;
  if (bbar <= 0.0L)
    throw NumericalError("first_passage_transform: degenerate denominator");
  const long double ratio = abar / bbar;
  // delta method on the ratio of correlated means
  long double s2 = 0.0L;
  for (double m : ms) {
    const long double e = std::exp(beta * m);
    const long double d = (m < c ? e : 0.0L) - ratio * e;
    s2 += d * d;
  }
  const long double var = s2 / (n - 1);
  const double se =
      static_cast<double>(std::sqrt(var / n) / bbar) * scale;
  return {scale * static_cast<double>(ratio), se};
}

ValueWithError first_passage_transform(const LevyModel& m, Horizon h,
                                       double beta, double x, double y,
                                       const SampleConfig& config) {
  return first_passage_transform(extrema_law(m, h, ExtremeSide::Infimum, config),
                                 beta, x, y);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void save_extrema_law(const ExtremaLaw& law, const LevyModel& m,
                      const std::string& stem) {
  if (law.exact())
    throw UsageError("save_extrema_law: exact laws have nothing to persist");
  std::ofstream csv(stem + ".csv");
  if (!csv) throw UsageError("save_extrema_law: cannot write '" + stem + ".csv'");
  csv << "sample\n";
  char buf[40];
  for (double v : law.samples()) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    csv << buf;
  }
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(m.hash()));
  nlohmann::ordered_json meta = {
      {"side", law.side() == ExtremeSide::Supremum ? "supremum" : "infimum"},
      {"q", law.q()},
      {"n_samples", law.samples().size()},
      {"seed", law.seed()},
      {"dt_cap", law.dt_cap()},
      {"model_hash", buf},
      {"model", m.to_json()},
  };
  std::ofstream js(stem + ".json");
  if (!js) throw UsageError("save_extrema_law: cannot write '" + stem + ".json'");
  js << meta.dump(2) << "\n";
}

ExtremaLaw load_extrema_law(const std::string& stem,
                            const LevyModel* expected_model) {
  std::ifstream js(stem + ".json");
  if (!js) throw UsageError("load_extrema_law: cannot open '" + stem + ".json'");
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("load_extrema_law: bad metadata: " + std::string(e.what()));
  }
  const std::string side_s = meta.at("side").get<std::string>();
  if (side_s != "supremum" && side_s != "infimum")
    throw UsageError("load_extrema_law: side must be 'supremum' or 'infimum'");
  if (expected_model) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(expected_model->hash()));
    if (meta.at("model_hash").get<std::string>() != buf)
      throw UsageError(
          "load_extrema_law: stored samples belong to a different model");
  }
  std::ifstream csv(stem + ".csv");
  if (!csv) throw UsageError("load_extrema_law: cannot open '" + stem + ".csv'");
  std::string line;
  std::getline(csv, line);  // header
  std::vector<double> samples;
  samples.reserve(meta.value("n_samples", 0));
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    samples.push_back(std::stod(line));
  }
  return ExtremaLaw::empirical(
      side_s == "supremum" ? ExtremeSide::Supremum : ExtremeSide::Infimum,
      meta.at("q").get<double>(), std::move(samples),
      meta.at("seed").get<std::uint64_t>(), meta.at("dt_cap").get<double>());
}

}  // namespace levystop::fluct
