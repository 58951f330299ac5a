#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace nols {

// Seedable, splittable generator. Draw helpers avoid std distributions so that
// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Child stream keyed by a label; independent of how much the parent has drawn.
  Rng split(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : label) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
    return Rng(mix(seed_ ^ h));
  }

  Rng split(std::uint64_t index) const { return Rng(mix(seed_ + 0x9E3779B97F4A7C15ULL * (index + 1))); }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace nols
