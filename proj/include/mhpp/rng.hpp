#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mhpp {

// Portable random source: std::mt19937_64 (its output sequence is fixed by
// the standard) plus rejection-sampled bounded integers, so draws match
// across standard libraries. Version tag "mt64-rej-v1".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // First k entries of `items` become a uniform sample without replacement.
  template <class T>
  void partial_shuffle(std::vector<T>& items, std::size_t k) {
    for (std::size_t i = 0; i < k && i < items.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mhpp
