#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace levystop::rng {

// Deterministic, cross-platform random number generation.  std::mt19937 +
// std::*_distribution are avoided on purpose: distribution algorithms differ
// between standard library implementations, and the reproducibility contract
// (same seed => same output, independent of machine and worker count) requires
// that every random draw be pinned down by this file alone.

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ core generator.
class Xoshiro256 {
 public:
  Xoshiro256() : Xoshiro256(0xDEADBEEFCAFEF00DULL, 0) {}

  // Stream construction: (seed, stream) pairs give statistically independent
  // generators.  Used to assign one generator per simulated path so results
  // do not depend on how paths are distributed over threads.
  Xoshiro256(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    s_[0] = splitmix64(s);
    s_[1] = splitmix64(s);
    s_[2] = splitmix64(s);
    s_[3] = splitmix64(s);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is absorbing
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() noexcept {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

namespace detail {

// 256-layer ziggurat tables for the standard normal, built once at startup.
// Layer boundaries x_i are descending in i via the classic equal-area
// recurrence; index 0 is the base layer whose rectangle extends into the tail.
struct NormalZiggurat {
  static constexpr int kLayers = 256;
  // x[0] is the pseudo-width of the base layer, x[1] = R, x[256] ~ 0.
  std::array<double, kLayers + 1> x{};
  // f[i] = exp(-x[i]^2 / 2); f ascending in i.
  std::array<double, kLayers + 1> f{};
  double r = 0.0;

  NormalZiggurat();
  static const NormalZiggurat& instance();
};

}  // namespace detail

// Standard normal via ziggurat with exact wedge/tail correction.  Roughly 5x
// faster than Box-Muller with libm trig, which matters: the acceptance-grade
// Monte Carlo runs draw ~1e9 normals on a single core.
class NormalSampler {
 public:
  NormalSampler() : z_(detail::NormalZiggurat::instance()) {}

  double operator()(Xoshiro256& g) const noexcept {
    for (;;) {
      const std::uint64_t bits = g.next();
      const int i = static_cast<int>(bits & 0xFF);
      // signed uniform in [-1, 1) from the top 53 bits
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
      const double cand = u * z_.x[i];
      if (cand > -z_.x[i + 1] && cand < z_.x[i + 1]) return cand;
      if (i == 0) return tail(g, u < 0.0);
      const double fx =
          z_.f[i] + g.uniform() * (z_.f[i + 1] - z_.f[i]);
      if (fx < gauss(cand)) return cand;
    }
  }

 private:
  static double gauss(double v) noexcept;
  double tail(Xoshiro256& g, bool negative) const noexcept;
  const detail::NormalZiggurat& z_;
};

inline double exponential(Xoshiro256& g, double rate) noexcept;

// One generator per path plus the shared normal tables.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t stream) : gen_(seed, stream) {}

  double normal() noexcept { return normal_(gen_); }
  double uniform() noexcept { return gen_.uniform(); }
  double uniform_pos() noexcept { return gen_.uniform_pos(); }
  double exponential(double rate) noexcept { return rng::exponential(gen_, rate); }
  Xoshiro256& generator() noexcept { return gen_; }

 private:
  Xoshiro256 gen_;
  NormalSampler normal_;
};

inline double exponential(Xoshiro256& g, double rate) noexcept {
  return -std::log(g.uniform_pos()) / rate;
}

}  // namespace levystop::rng
