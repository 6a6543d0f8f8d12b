#include "sfdel/rng.hpp"

#include <cmath>

namespace sfdel {

namespace {

// splitmix64: advances x and returns a mixed word.  Used only to expand seeds
// into generator state and to derive child seeds.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Seed Seed::sub(std::uint64_t tag) const {
  std::uint64_t x = value;
  (void)splitmix64(x);
  x ^= 0xd1342543de82ef95ULL * (tag + 1);
  std::uint64_t child = splitmix64(x);
  return Seed{child, stream};
}

Rng::Rng(Seed s) {
  std::uint64_t x = s.value;
  (void)splitmix64(x);
  x ^= rotl(s.stream, 29) + 0x9e3779b97f4a7c15ULL;
  for (auto& word : state_) word = splitmix64(x);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_half_open(double lo, double hi) {
  // u in [0,1) mapped to hi - u*(hi-lo) in (lo, hi].
  return hi - uniform01() * (hi - lo);
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_ = true;
  return u * f;
}

}  // namespace sfdel
