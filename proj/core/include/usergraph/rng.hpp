#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace usergraph {

// Deterministic random source. Every stage of the pipeline draws from a
// substream derived from the single top-level seed via derive("stage-name"),
// so runs are reproducible end to end from one integer.
//
// std::uniform_*_distribution is avoided on purpose: its output is
// implementation-defined, and run reports are compared bit-for-bit in tests.
// Generator: xoshiro256**, seeded through splitmix64. Substream derivation:
// new_seed = splitmix64(base_seed ^ fnv1a64(name)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  // Independent substream named by a stage label. Depends only on the
  // original seed and the name, not on how much this stream has consumed.
  Rng derive(std::string_view name) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : name) {
      h ^= c;
      h *= 1099511628211ull;
    }
    std::uint64_t mixed = base_seed_ ^ h;
    return Rng(splitmix64(mixed));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::next_below: bound must be positive");
    return next_u64() % bound;
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Fisher-Yates; std::shuffle is not reproducible across standard libraries.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static constexpr std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t splitmix64(std::uint64_t&& x) {
    std::uint64_t y = x;
    return splitmix64(y);
  }

  std::uint64_t state_[4];
  std::uint64_t base_seed_;
};

}  // namespace usergraph
