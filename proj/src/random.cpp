#include "logitbench/random.hpp"

#include <limits>

namespace logitbench {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::index(std::size_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> parts) {
  std::uint64_t h = splitmix64(master);
  for (std::string_view part : parts) {
    std::uint64_t fnv = 0xcbf29ce484222325ULL;
    for (unsigned char c : part) {
      fnv ^= c;
      fnv *= 0x100000001b3ULL;
    }
    // Length is folded in so ("ab","c") and ("a","bc") differ.
    h = splitmix64(h ^ fnv ^ (static_cast<std::uint64_t>(part.size()) << 56));
  }
  return h;
}

}  // namespace logitbench
