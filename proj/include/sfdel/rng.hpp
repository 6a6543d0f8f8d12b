#pragma once

#include <cstdint>

namespace sfdel {

// Identifies one reproducible random stream.  Identical (value, stream) pairs
// always yield bit-identical draw sequences; distinct streams are independent
// for practical purposes.  Replicated experiments assign one stream per
// replicate so results do not depend on scheduling or thread count.
struct Seed {
  std::uint64_t value = 0;
  std::uint64_t stream = 0;

  // Deterministically derive a decorrelated child seed for a named purpose
  // (e.g. site positions vs. field noise within one replicate).
  [[nodiscard]] Seed sub(std::uint64_t tag) const;
};

// xoshiro256++ generator whose state is expanded from (value, stream) with a
// splitmix64 chain.  Not cryptographic; chosen for speed, equidistribution and
// cheap stream splitting.
class Rng {
 public:
  explicit Rng(Seed s);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform on the half-open interval (lo, hi].
  double uniform_half_open(double lo, double hi);

  // Standard normal via the Marsaglia polar method (pairs cached).
  double normal();

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sfdel
