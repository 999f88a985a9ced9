#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pedrisk {

// All sampling goes through this wrapper. The mt19937_64 stream is fixed by
// the C++ standard and every distribution below is written out explicitly,
// so a given seed reproduces bit-identical draws on any compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift map; bias is O(n / 2^64).
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller, cosine branch only, so one call consumes exactly two draws.
  double normal(double mean, double sd) {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + sd * z;
  }

  // Normal truncated to [lo, hi] by resampling.
  double normal_trunc(double mean, double sd, double lo, double hi) {
    for (;;) {
      double v = normal(mean, sd);
      if (v >= lo && v <= hi) return v;
    }
  }

  // Index draw from unnormalized weights (linear CDF scan).
  std::size_t categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return w.empty() ? 0 : w.size() - 1;
  }

  // Fisher-Yates shuffle of 0..n-1.
  std::vector<std::uint32_t> permutation(std::size_t n) {
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = uniform_int(i);
      std::swap(idx[i - 1], idx[j]);
    }
    return idx;
  }

  // k distinct indices out of 0..n-1, in random order.
  std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                        std::size_t k) {
    std::vector<std::uint32_t> idx = permutation(n);
    if (k < n) idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-item seed stream: independent of worker count and iteration order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15ull));
}

}  // namespace pedrisk
