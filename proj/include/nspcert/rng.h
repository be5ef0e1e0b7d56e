#ifndef NSPCERT_RNG_H_
#define NSPCERT_RNG_H_

#include <array>
#include <cstdint>

namespace nspcert {

// xoshiro256** seeded through splitmix64.
//
// Stream-split rule: Rng(seed, stream) seeds the state from splitmix64(seed)
// and then applies the standard 2^128 jump `stream` times, so substreams of
// one seed never overlap. Every generated matrix, signal batch and sample
// batch draws from its own substream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1].
  double UniformOpenLow();
  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();
  // Uniform integer in [0, bound) by rejection.
  std::uint64_t Below(std::uint64_t bound);

  void Jump();

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace nspcert

#endif  // NSPCERT_RNG_H_
