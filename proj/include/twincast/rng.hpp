#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace twincast {

// Named sub-streams derived from the single run seed. Every subsystem draws
// from its own stream so that adding draws in one place never shifts another.
enum class RngStream : std::uint64_t {
  Workload = 0x01,
  Agent = 0x02,
  Clustering = 0x03,
  Catalog = 0x04,
  Instances = 0x05,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic generator. The engine is std::mt19937_64 (bit-exact by the
// standard); all distributions are implemented here because std::
// distribution algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1); 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection sampling for an unbiased draw.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
  }

  // Standard normal via Box-Muller (no cached spare, so the draw count per
  // call is fixed).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Index sampled proportionally to nonnegative weights. Total weight 0 is
  // the caller's problem; throws.
  std::size_t sample_discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0))
      throw std::invalid_argument("sample_discrete: total weight not > 0");
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

  // First k entries of a random permutation of {0..n-1}.
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k > n) throw std::invalid_argument("sample k > n");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = uniform_int(i, n - 1);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

// Seed derivation: run seed + stream tag + index, whitened through
// splitmix64. The same (seed, stream, index) always yields the same stream
// regardless of what other subsystems consumed.
inline Rng derive_rng(std::uint64_t seed, RngStream stream,
                      std::uint64_t index = 0) {
  const std::uint64_t tag =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
  return Rng(splitmix64(tag ^ splitmix64(index)));
}

}  // namespace twincast
