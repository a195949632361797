#ifndef NAGNTK_RNG_H_
#define NAGNTK_RNG_H_

#include <cstdint>
#include <random>

namespace nagntk {

// Deterministic 64-bit generator: std::mt19937_64 seeded through splitmix64.
// Normal deviates use the Box-Muller transform on 53-bit uniforms, so streams
// are reproducible across standard libraries (std::normal_distribution is
// not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (seed, stream).
  static Rng stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on (0, 1].
  double uniform();
  double normal();
  // +1 or -1 with probability 1/2 each.
  double rademacher();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nagntk

#endif  // NAGNTK_RNG_H_
