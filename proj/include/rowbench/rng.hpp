// Deterministic random number streams for simulation and training.
//
// Everything random in a run flows from one 64-bit root seed. Substreams are
// derived by hashing tags (component name, episode, slot, edge index, ...)
// into the root, so changing how one component consumes randomness never
// perturbs another component's stream. Draw algorithms are implemented here
// rather than taken from <random> so that sequences are identical across
// standard libraries and can be pinned by tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace rowbench {

// SplitMix64 (Steele, Lea, Flood 2014). Passes BigCrush, two ulp-cheap ops
// per draw, trivially serializable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 mantissa bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Index in [0, n). Bias from the float path is ~2^-53, irrelevant here.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) return 0;
    auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller. Draws a fresh pair of uniforms per call and discards the
  // sibling variate, keeping the generator state a single counter.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double exponential(double mean) { return -mean * std::log(1.0 - uniform01()); }

  // Knuth's product method, chunked so exp(-lambda) never underflows.
  std::uint64_t poisson(double lambda) {
    std::uint64_t count = 0;
    while (lambda > 400.0) {
      count += poisson_small(400.0);
      lambda -= 400.0;
    }
    return count + poisson_small(lambda);
  }

 private:
  std::uint64_t poisson_small(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Hierarchical stream key. `RngKey(seed).with("sim").with(episode).with(slot)`
// names one substream; `stream()` yields an engine positioned at its start.
class RngKey {
 public:
  explicit RngKey(std::uint64_t root) : hash_(detail::mix64(root ^ 0x6a09e667f3bcc908ULL)) {}

  RngKey with(std::uint64_t tag) const {
    RngKey k = *this;
    k.hash_ = detail::mix64(k.hash_ ^ (tag + 0x9e3779b97f4a7c15ULL));
    return k;
  }

  RngKey with(std::string_view tag) const {
    // FNV-1a over the tag bytes, then remixed into the chain.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return with(h);
  }

  std::uint64_t value() const { return hash_; }
  SplitMix64 stream() const { return SplitMix64(hash_); }

 private:
  std::uint64_t hash_;
};

}  // namespace rowbench
