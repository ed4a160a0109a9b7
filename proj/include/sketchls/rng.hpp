#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace sketchls {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a list of words, used to derive per-row and
/// per-trial seeds.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

/// Counter-based generator: the i-th output of stream (seed, stream) is a
/// pure function of (seed, stream, i), so streams can be drawn independently
/// and in any order. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix_seed({seed, stream})) {}

  result_type operator()() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * counter_++); }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double sign() { return ((*this)() >> 63) != 0 ? 1.0 : -1.0; }
  double normal() { return normal_(*this); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(*this);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

}  // namespace sketchls
