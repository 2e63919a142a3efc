#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ww {

// Identifier of the generator below, recorded in every instance so that
// other implementations can reproduce the same streams.
inline constexpr const char* kRngAlgorithm = "xoshiro256ss-v1";

std::uint64_t splitmix64(std::uint64_t& state);

// Portable deterministic PRNG (xoshiro256**), seeded through splitmix64.
// Substreams are forked by purpose tag so that adding draws to one
// generation stage never perturbs another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent child stream for a named purpose (e.g. "backbone", "mask").
  Rng fork(std::string_view purpose) const;

  std::uint64_t next_u64();

  // Unbiased uniform draw in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Uniform integer in [lo, hi] inclusive.
  int range(int lo, int hi);

  // Uniform double in [0, 1).
  double unit();

  bool chance(double p);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

  // k distinct values sampled from [0, n), in random order.
  std::vector<int> sample(int n, int k);

 private:
  std::uint64_t s_[4];
  std::uint64_t base_seed_;
};

}  // namespace ww
