#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fsaug/matrix.hpp"

namespace fsaug {

// Seeded random stream with a fixed, documented algorithm. The distribution
// transforms are implemented here rather than with <random>'s distribution
// classes, whose output is implementation-defined; this way identical seeds
// give identical draws on every platform.
//
//   engine    mt19937_64 (bit-stable per the C++ standard)
//   uniform   (x >> 11) * 2^-53                       -> [0, 1)
//   normal    Box-Muller on uniform pairs, spare cached
//   split     splitmix64 mix of (seed, tag), state-independent
class RandomStream {
 public:
  static constexpr const char* kAlgorithmId = "mt19937_64/canonical53/box-muller";

  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi); degenerate lo == hi returns lo exactly but still
  // consumes one draw so call sequences stay aligned.
  double uniform(double lo, double hi) {
    if (lo > hi) throw ParameterError("RandomStream::uniform: lo > hi");
    const double u = uniform();
    return lo + u * (hi - lo);
  }

  // Standard normal draw (Box-Muller, second value of each pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  NumericVector normal_vector(int n) {
    if (n < 1) throw ParameterError("RandomStream::normal_vector: n < 1");
    NumericVector out(n);
    for (int i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  // Unbiased index in [0, n) via rejection on the top of the 64-bit range.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw ParameterError("RandomStream::uniform_index: n == 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % n);
  }

  // Fisher-Yates with our own index draws; std::shuffle is
  // implementation-defined and would break cross-platform determinism.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

  // Derived stream for an independent purpose (per-epoch, per-operator,
  // per-sample). Depends only on the original seed and the tag, never on
  // how much of this stream has been consumed.
  RandomStream split(std::uint64_t tag) const {
    std::uint64_t x = seed_ ^ mix64(tag + 0x9e3779b97f4a7c15ULL);
    return RandomStream(mix64(x));
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  // splitmix64 finalizer
  static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fsaug
