#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace seqdet {

/// splitmix64 step; used both as a stream-derivation mixer and to seed the
/// main generator. Constants from Steele, Lea & Flood (2014).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ with a Gaussian variate on top. All simulation randomness
/// flows through this type so estimates are reproducible bit-for-bit; the
/// standard library distributions are implementation-defined and would not
/// give stable output across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via the Marsaglia polar method; pairs are cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    have_spare_ = true;
    return u * scale;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Derives the generator for one Monte Carlo trial from the master seed, a
/// stream label (grid point / estimator purpose), and the trial index. The
/// chain is pure splitmix64 mixing, so per-trial streams depend only on
/// these three values: results never depend on the worker count, and adding
/// grid points never perturbs existing ones.
inline Rng derive_rng(std::uint64_t master_seed, std::uint64_t stream_label,
                      std::uint64_t trial_index) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ stream_label;
  std::uint64_t b = splitmix64(s);
  s = b ^ trial_index;
  return Rng(splitmix64(s));
}

/// Folds an estimator tag and a grid point's identity into one stream label.
inline std::uint64_t stream_label(std::uint64_t purpose, double grid_value,
                                  std::uint64_t extra = 0) {
  const auto bits = std::bit_cast<std::uint64_t>(grid_value);
  std::uint64_t s = purpose ^ (bits * 0x9e3779b97f4a7c15ULL);
  std::uint64_t m = splitmix64(s);
  s = m ^ extra;
  return splitmix64(s);
}

}  // namespace seqdet
