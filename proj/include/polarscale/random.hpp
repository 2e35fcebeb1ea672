#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace polarscale {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Derives an independent seed for a labelled purpose from a master seed.
///
/// All randomness in the library fans out from one master seed this way:
/// `derive_seed(master, "train", 0)`, `derive_seed(master, "seed-sample", i)`
/// and so on. The mapping is FNV-1a over the label mixed into the master seed
/// and index with splitmix64, so it is stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

// Platform-stable random source. Does not use std distributions, whose
// output differs between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace polarscale
