#include "levystop/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>

#include "levystop/errors.hpp"

namespace levystop::sim {

PathGrid PathGrid::standard(double q, std::uint64_t seed_) {
  Horizon h(q);  // validates q > 0
  PathGrid g;
  g.t_max = std::log(1e6) / h.q;
  g.dt = std::min(1e-3, g.t_max / 1000.0);
  g.seed = seed_;
  return g;
}

double payoff_value(const Payoff& g, double state) {
  if (const auto* put = std::get_if<PutPayoff>(&g))
    return std::max(put->strike - std::exp(state), 0.0);
  if (const auto* pw = std::get_if<PowerPayoff>(&g))
    return state > 0.0 ? std::pow(state, pw->nu) : 0.0;
  if (std::holds_alternative<ExpGainPayoff>(g))
    return std::max(1.0 - std::exp(-state), 0.0);
  return std::exp(std::get<ExpOfStatePayoff>(g).beta * state);
}

double payoff_cap(const Payoff& g, double level_bound) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (const auto* put = std::get_if<PutPayoff>(&g)) return put->strike;
  if (std::holds_alternative<PowerPayoff>(g)) return kInf;
  if (std::holds_alternative<ExpGainPayoff>(g)) return 1.0;
  (void)level_bound;
  return kInf;
}

namespace {

constexpr std::size_t kChunk = 4096;

// Streaming mean and second central moment (Welford update, Chan merge):
// constant samples yield an exactly zero variance, which plain sums of
// squares lose to cancellation.
struct Accum {
  std::vector<std::size_t> n;
  std::vector<long double> mean, m2;
  std::size_t truncated = 0;
  double max_payoff = 0.0;

  explicit Accum(std::size_t k) : n(k, 0), mean(k, 0.0L), m2(k, 0.0L) {}

  void add(std::size_t i, double v) {
    ++n[i];
    const long double d = v - mean[i];
    mean[i] += d / static_cast<long double>(n[i]);
    m2[i] += d * (v - mean[i]);
  }

  void merge(const Accum& o) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (o.n[i] == 0) continue;
      if (n[i] == 0) {
        n[i] = o.n[i];
        mean[i] = o.mean[i];
        m2[i] = o.m2[i];
        continue;
      }
      const long double na = static_cast<long double>(n[i]);
      const long double nb = static_cast<long double>(o.n[i]);
      const long double d = o.mean[i] - mean[i];
      mean[i] += d * nb / (na + nb);
      m2[i] += o.m2[i] + d * d * na * nb / (na + nb);
      n[i] += o.n[i];
    }
    truncated += o.truncated;
    max_payoff = std::max(max_payoff, o.max_payoff);
  }

  double average(std::size_t i) const { return static_cast<double>(mean[i]); }

  double std_error(std::size_t i) const {
    if (n[i] < 2) return 0.0;
    const long double var =
        std::max(0.0L, m2[i] / static_cast<long double>(n[i] - 1));
    return static_cast<double>(
        std::sqrt(var / static_cast<long double>(n[i])));
  }
};

// Runs fn(unit_index, accum) over all units.  Units are grouped into fixed
// chunks that are merged in index order, so the result is bit-identical for
// any worker count.
template <class Fn>
Accum run_units(std::size_t n_units, std::size_t k, unsigned threads, Fn&& fn) {
  const std::size_t n_chunks = n_units == 0 ? 0 : (n_units - 1) / kChunk + 1;
  std::vector<Accum> chunk_acc(n_chunks, Accum(k));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      Accum& acc = chunk_acc[c];
      const std::size_t lo = c * kChunk;
      const std::size_t hi = std::min(lo + kChunk, n_units);
      for (std::size_t u = lo; u < hi; ++u) fn(u, acc);
    }
  };
  unsigned t = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  t = static_cast<unsigned>(
      std::min<std::size_t>(t, n_chunks == 0 ? 1 : n_chunks));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  Accum total(k);
  for (const Accum& a : chunk_acc) total.merge(a);
  return total;
}

struct PathOutcome {
  bool stopped = false;
  double tau = 0.0;
  double state = 0.0;
};

// First-passage detection for a single threshold.  Continuous segments with
// sigma = 0 are exact straight lines, so their crossings are solved in closed
// form; diffusive segments are monitored at endpoints.
struct SingleStopVisitor {
  StopKind kind;
  double level;
  double x0;       // coordinate origin (y0 for the reflected coordinate)
  bool sigma_zero;
  double run_max = 0.0;  // running max of the raw path (reflected only)
  PathOutcome out;

  bool on_segment(double t0, double xa, double t1, double xb) {
    switch (kind) {
      case StopKind::PassBelow: {
        const double cb = x0 + xb;
        if (cb <= level) {
          if (sigma_zero && xb < xa) {
            const double ca = x0 + xa;
            const double slope = (cb - ca) / (t1 - t0);
            out = {true, t0 + (level - ca) / slope, level};
          } else {
            out = {true, t1, cb};
          }
        }
        break;
      }
      case StopKind::PassAbove: {
        const double cb = x0 + xb;
        if (cb >= level) {
          if (sigma_zero && xb > xa) {
            const double ca = x0 + xa;
            const double slope = (cb - ca) / (t1 - t0);
            out = {true, t0 + (level - ca) / slope, level};
          } else {
            out = {true, t1, cb};
          }
        }
        break;
      }
      case StopKind::ReflectedAbove: {
        // the recorded state is the running maximum x0 v sup X, the
        // quantity the payoff is evaluated at for reflected rules
        if (sigma_zero && xb < xa) {
          // falling segment: the drawdown rises linearly, max is frozen
          const double high = std::max(x0, run_max);
          const double yb = high - xb;
          if (yb >= level) {
            const double slope = (xb - xa) / (t1 - t0);
            out = {true, t0 + ((high - level) - xa) / slope, high};
            break;
          }
        }
        run_max = std::max(run_max, xb);
        const double yb = std::max(x0, run_max) - xb;
        if (!sigma_zero && yb >= level)
          out = {true, t1, std::max(x0, run_max)};
        break;
      }
    }
    return !out.stopped;
  }

  bool on_jump(double t, double /*x_before*/, double x_after) {
    switch (kind) {
      case StopKind::PassBelow: {
        const double c = x0 + x_after;
        if (c <= level) out = {true, t, c};
        break;
      }
      case StopKind::PassAbove: {
        const double c = x0 + x_after;
        if (c >= level) out = {true, t, c};
        break;
      }
      case StopKind::ReflectedAbove: {
        run_max = std::max(run_max, x_after);
        const double y = std::max(x0, run_max) - x_after;
        if (y >= level) out = {true, t, std::max(x0, run_max)};
        break;
      }
    }
    return !out.stopped;
  }
};

bool triggers_immediately(StopKind kind, double coord0, double level) {
  return kind == StopKind::PassBelow ? coord0 <= level : coord0 >= level;
}

template <class Rng>
PathOutcome run_single(const LevyModel& m, const StopSpec& s,
                       const PathGrid& grid, Rng& rng) {
  if (triggers_immediately(s.kind, s.x0, s.level)) return {true, 0.0, s.x0};
  SingleStopVisitor vis{s.kind, s.level, s.x0,
                        m.gaussian_sigma() == 0.0, 0.0, {}};
  walk_path(m, rng, grid.dt, grid.t_max, vis);
  return vis.out;
}

}  // namespace

McEstimate estimate_stopped_payoff(const LevyModel& m, Horizon h,
                                   const StopSpec& spec, const PathGrid& grid,
                                   std::size_t n_paths) {
  if (n_paths < 1000)
    throw UsageError("estimate_stopped_payoff: need n_paths >= 1000");
  if (!(grid.dt > 0.0) || !(grid.t_max > 0.0))
    throw UsageError("estimate_stopped_payoff: grid dt and t_max must be positive");
  const bool anti = grid.antithetic;
  const std::size_t n_units = anti ? (n_paths + 1) / 2 : n_paths;
  const double q = h.q;

  auto unit_fn = [&](std::size_t u, Accum& acc) {
    rng::PathRng r(grid.seed, u);
    const PathOutcome a = run_single(m, spec, grid, r);
    double va = 0.0;
    if (a.stopped) {
      const double g = payoff_value(spec.payoff, a.state);
      acc.max_payoff = std::max(acc.max_payoff, g);
      va = std::exp(-q * a.tau) * g;
    } else {
      ++acc.truncated;
    }
    double v = va;
    if (anti) {
      rng::PathRng r2(grid.seed, u);
      AntitheticRng flip{r2};
      const PathOutcome b = run_single(m, spec, grid, flip);
      double vb = 0.0;
      if (b.stopped) {
        const double g = payoff_value(spec.payoff, b.state);
        acc.max_payoff = std::max(acc.max_payoff, g);
        vb = std::exp(-q * b.tau) * g;
      } else {
        ++acc.truncated;
      }
      v = 0.5 * (va + vb);
    }
    acc.add(0, v);
  };

  const Accum total = run_units(n_units, 1, grid.threads, unit_fn);

  McEstimate est;
  est.n_paths = n_units * (anti ? 2 : 1);
  est.seed = grid.seed;
  est.value = total.average(0);
  est.std_error = total.std_error(0);
  est.truncated_fraction =
      static_cast<double>(total.truncated) / static_cast<double>(est.n_paths);
  double cap = payoff_cap(spec.payoff, spec.level);
  if (!std::isfinite(cap))
    cap = std::max(payoff_value(spec.payoff, spec.level), total.max_payoff);
  est.truncation_bias_bound =
      std::exp(-q * grid.t_max) * cap * est.truncated_fraction;
  return est;
}

// ---------------------------------------------------------------------------
// Common-random-numbers sweep
// ---------------------------------------------------------------------------

namespace {

// Crossing records for a whole threshold grid from one walked path.  The
// thresholds are visited in crossing order (descending for PassBelow,
// ascending otherwise); `ptr` marks the first threshold not yet crossed, and
// the walk stops as soon as every threshold has been resolved.
struct SweepVisitor {
  StopKind kind;
  double x0;
  bool sigma_zero;
  const std::vector<double>& order;  // thresholds in crossing order
  std::vector<double>& tau;          // indexed like `order`
  std::vector<double>& state;
  std::vector<char>& hit;
  std::size_t ptr = 0;
  double run_max = 0.0;

  void record(double t, double s) {
    tau[ptr] = t;
    state[ptr] = s;
    hit[ptr] = 1;
    ++ptr;
  }

  void cross_discrete(double t, double c) {
    if (kind == StopKind::PassBelow)
      while (ptr < order.size() && c <= order[ptr]) record(t, c);
    else
      while (ptr < order.size() && c >= order[ptr]) record(t, c);
  }

  bool on_segment(double t0, double xa, double t1, double xb) {
    switch (kind) {
      case StopKind::PassBelow:
      case StopKind::PassAbove: {
        const double ca = x0 + xa;
        const double cb = x0 + xb;
        if (sigma_zero) {
          const bool falling = cb < ca;
          const double slope = (cb - ca) / (t1 - t0);
          if (kind == StopKind::PassBelow && falling) {
            while (ptr < order.size() && cb <= order[ptr])
              record(t0 + (order[ptr] - ca) / slope, order[ptr]);
          } else if (kind == StopKind::PassAbove && !falling && cb > ca) {
            while (ptr < order.size() && cb >= order[ptr])
              record(t0 + (order[ptr] - ca) / slope, order[ptr]);
          }
        } else {
          cross_discrete(t1, cb);
        }
        break;
      }
      case StopKind::ReflectedAbove: {
        // recorded state at a crossing is the running maximum, as in the
        // single-threshold visitor
        if (sigma_zero && xb < xa) {
          const double high = std::max(x0, run_max);
          const double yb = high - xb;
          const double slope = (xb - xa) / (t1 - t0);
          while (ptr < order.size() && yb >= order[ptr])
            record(t0 + ((high - order[ptr]) - xa) / slope, high);
          break;
        }
        run_max = std::max(run_max, xb);
        if (sigma_zero) break;  // rising exact segment: drawdown shrinks
        const double yb = std::max(x0, run_max) - xb;
        while (ptr < order.size() && yb >= order[ptr])
          record(t1, std::max(x0, run_max));
        break;
      }
    }
    return ptr < order.size();
  }

  bool on_jump(double t, double /*x_before*/, double x_after) {
    if (kind == StopKind::ReflectedAbove) {
      run_max = std::max(run_max, x_after);
      const double y = std::max(x0, run_max) - x_after;
      while (ptr < order.size() && y >= order[ptr])
        record(t, std::max(x0, run_max));
    } else {
      cross_discrete(t, x0 + x_after);
    }
    return ptr < order.size();
  }
};

}  // namespace

SweepResult sweep_threshold(const LevyModel& m, Horizon h, StopKind kind,
                            const Payoff& payoff, double x0,
                            const std::vector<double>& thresholds,
                            const PathGrid& grid, std::size_t n_paths) {
  if (thresholds.empty()) throw UsageError("sweep_threshold: empty grid");
  if (n_paths < 2) throw UsageError("sweep_threshold: need n_paths >= 2");
  std::vector<double> asc = thresholds;
  std::sort(asc.begin(), asc.end());
  const std::size_t k = asc.size();

  // crossing order: a falling running minimum meets high thresholds first
  std::vector<double> order = asc;
  if (kind == StopKind::PassBelow) std::reverse(order.begin(), order.end());

  const bool anti = grid.antithetic;
  const std::size_t n_units = anti ? (n_paths + 1) / 2 : n_paths;
  const double q = h.q;
  const bool sigma_zero = m.gaussian_sigma() == 0.0;

  auto run_one = [&](auto& rng, std::vector<double>& tau,
                     std::vector<double>& state, std::vector<char>& hit) {
    std::fill(hit.begin(), hit.end(), 0);
    SweepVisitor vis{kind, x0, sigma_zero, order, tau, state, hit, 0, 0.0};
    // immediate crossings at t = 0 (threshold at or past the start point)
    if (kind == StopKind::ReflectedAbove || kind == StopKind::PassAbove) {
      while (vis.ptr < k && x0 >= order[vis.ptr]) vis.record(0.0, x0);
    } else {
      while (vis.ptr < k && x0 <= order[vis.ptr]) vis.record(0.0, x0);
    }
    if (vis.ptr < k) walk_path(m, rng, grid.dt, grid.t_max, vis);
  };

  auto unit_fn = [&](std::size_t u, Accum& acc) {
    thread_local std::vector<double> tau, state, vals;
    thread_local std::vector<char> hit;
    tau.assign(k, 0.0);
    state.assign(k, 0.0);
    hit.assign(k, 0);
    vals.assign(k, 0.0);

    rng::PathRng r(grid.seed, u);
    run_one(r, tau, state, hit);
    for (std::size_t j = 0; j < k; ++j)
      vals[j] = hit[j] != 0
                    ? std::exp(-q * tau[j]) * payoff_value(payoff, state[j])
                    : 0.0;
    if (anti) {
      rng::PathRng r2(grid.seed, u);
      AntitheticRng flip{r2};
      tau.assign(k, 0.0);
      state.assign(k, 0.0);
      run_one(flip, tau, state, hit);
      for (std::size_t j = 0; j < k; ++j) {
        const double vb =
            hit[j] != 0
                ? std::exp(-q * tau[j]) * payoff_value(payoff, state[j])
                : 0.0;
        vals[j] = 0.5 * (vals[j] + vb);
      }
    }
    for (std::size_t j = 0; j < k; ++j) acc.add(j, vals[j]);
  };

  const Accum total = run_units(n_units, k, grid.threads, unit_fn);

  SweepResult res;
  res.n_paths = n_units * (anti ? 2 : 1);
  res.seed = grid.seed;
  res.points.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    // map crossing order back to ascending order
    const std::size_t src = kind == StopKind::PassBelow ? k - 1 - j : j;
    res.points[j] = {asc[j], total.average(src), total.std_error(src)};
  }
  res.argmax = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (res.points[j].estimate > res.points[res.argmax].estimate) res.argmax = j;
  res.grid_step = k > 1 ? (asc.back() - asc.front()) /
                              static_cast<double>(k - 1)
                        : 0.0;
  const double best = res.points[res.argmax].estimate;
  std::size_t lo = res.argmax, hi = res.argmax;
  for (std::size_t j = 0; j < k; ++j) {
    if (res.points[j].estimate >= best - res.points[j].std_error) {
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
  }
  res.plateau_lo = res.points[lo].threshold - 0.5 * res.grid_step;
  res.plateau_hi = res.points[hi].threshold + 0.5 * res.grid_step;
  return res;
}

}  // namespace levystop::sim
