#pragma once

#include <cmath>
#include <cstdint>

namespace bbl {

// splitmix64 step: advances the state and returns one output word.
// Chosen over <random> engines because its output is fixed by the algorithm,
// not the standard library, so recorded seeds replay on any platform.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// One independent stream of randomness. All stochastic code in the library
// takes an explicit stream; nothing reads global RNG state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log argument.
  double next_uniform_pos() { return 1.0 - next_uniform(); }

  // Standard normal, Box-Muller transform. Consumes exactly two uniforms per
  // call and keeps no cached spare, so the draw count is predictable.
  double next_normal() {
    const double u1 = next_uniform_pos();
    const double u2 = next_uniform();
    constexpr double two_pi = 6.283185307179586476925287;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Child stream decorrelated from the parent and from other ids. Pure
  // function of (current state, id); does not advance the parent.
  RngStream substream(std::uint64_t id) const {
    std::uint64_t s = state_ ^ (0xD6E8FEB86659FD93ULL * (id + 1));
    splitmix64(s);
    return RngStream(splitmix64(s));
  }

 private:
  std::uint64_t state_;
};

// Episode seed derivation: one stable value per (base seed, horizon, rep).
// Keyed by the values themselves, not positions in some sweep order, so
// reordering or parallelizing a sweep cannot change any episode's stream.
// Pinned by tests; changing it invalidates every recorded run.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a,
                              std::uint64_t b) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a * 0x9E3779B97F4A7C15ULL);
  h = splitmix64(s);
  s = h ^ (b * 0xC2B2AE3D27D4EB4FULL);
  return splitmix64(s);
}

}  // namespace bbl
