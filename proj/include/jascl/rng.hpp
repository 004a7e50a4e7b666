#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include "jascl/common.hpp"

namespace jascl {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic random stream. Normal draws use Box-Muller so results do not
/// depend on the standard library's std::normal_distribution implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    engine_.seed(detail::splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1].
  double uniform_open0() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] via rejection-free Lemire reduction.
  std::uint64_t uniform_index(std::uint64_t n) {
    // n == 0 is a caller bug; modulo bias is irrelevant at these ranges but
    // Lemire keeps draws engine-stable.
    __uint128_t m = static_cast<__uint128_t>(engine_()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Standard normal via Box-Muller (cosine branch only; one draw per pair).
  double normal() {
    double u1 = uniform_open0();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Binomial(n, p) by inversion for small means, otherwise per-item mixture
  /// folded through a normal approximation is avoided: counting stays exact.
  std::uint64_t binomial(std::uint64_t n, double p) {
    if (p <= 0.0 || n == 0) return 0;
    if (p >= 1.0) return n;
    // BTPE is overkill here; n*min(p,1-p) stays small enough for inversion in
    // the dynamics oracle, and the trainer never calls this.
    std::binomial_distribution<std::uint64_t> dist(n, p);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Root of the seeding tree. Every consumer derives an independent stream by
/// name (e.g. "bench/session1/labeled"), so adding a consumer never perturbs
/// the draws of existing ones.
class RngRoot {
 public:
  explicit RngRoot(std::uint64_t root_seed) : root_seed_(root_seed) {}

  std::uint64_t root_seed() const { return root_seed_; }

  RngStream stream(std::string_view name) const {
    std::uint64_t h = fnv1a(name.data(), name.size());
    std::uint64_t s = root_seed_ ^ (h + 0x9e3779b97f4a7c15ull);
    return RngStream(s);
  }

  RngRoot child(std::string_view name) const {
    std::uint64_t h = fnv1a(name.data(), name.size());
    return RngRoot(root_seed_ ^ (h * 0x2545f4914f6cdd1dull + 0x6a09e667f3bcc909ull));
  }

 private:
  std::uint64_t root_seed_;
};

}  // namespace jascl
