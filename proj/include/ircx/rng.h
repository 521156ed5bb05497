#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ircx {

// Counter-based deterministic RNG. Streams are derived by hashing a base seed
// with string/int keys, so draws do not depend on program-wide call order and
// are reproducible across platforms (no std::random distributions involved).
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();
  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n);
  // Standard normal via Box-Muller (portable, unlike std::normal_distribution).
  double normal();

  // Fisher-Yates shuffle of 0..n-1.
  std::vector<int> permutation(int n);

 private:
  uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

uint64_t hash_combine(uint64_t seed, uint64_t v);
uint64_t hash_str(uint64_t seed, const std::string& s);

// Derives an independent stream from (seed, name, index).
Rng stream(uint64_t seed, const std::string& name, uint64_t index = 0);

}  // namespace ircx
