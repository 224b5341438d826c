#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace logitbench {

// Thin wrapper over mt19937_64. Uniform and integer draws are computed from raw
// engine output so they do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double normal();
  std::size_t index(std::size_t bound);  // uniform on [0, bound)
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

// Stable 64-bit hash of (master, parts...). Used for every per-unit seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> parts);

}  // namespace logitbench
