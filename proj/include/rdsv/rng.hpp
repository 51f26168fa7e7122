#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace rdsv {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the state is derived from a key tuple, so any
// (seed, case, window, ...) stream can be reproduced independently of the
// order in which streams are consumed.
//
//   state = mix64(k0); state = mix64(state ^ k_i) for each further key
//   next() = mix64(state += 0x9e3779b97f4a7c15)  (standard SplitMix64 step)
//   uniform() = (next() >> 11) * 2^-53
//   gaussian() = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)   (Box-Muller, cosine branch)
class KeyedRng {
 public:
  KeyedRng(std::initializer_list<std::uint64_t> keys) {
    bool first = true;
    for (auto k : keys) {
      state_ = first ? mix64(k) : mix64(state_ ^ k);
      first = false;
    }
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  double gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_ = 0;
};

// Stream tags keep independent uses of one seed apart.
enum class Stream : std::uint64_t { profiles = 1, timeline = 2, noise = 3, projection = 4 };

}  // namespace rdsv
