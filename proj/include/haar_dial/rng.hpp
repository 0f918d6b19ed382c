#pragma once

// Counter-based random streams. A stream is fully determined by
// (seed, stream id); draws never depend on how many other streams were
// consumed first, so sampling order and thread count cannot change results.
//
// Uniforms and normals are produced by hand rather than through <random>
// distributions, whose algorithms are implementation-defined.

#include <cmath>
#include <cstdint>

#include "haar_dial/linalg.hpp"

namespace haar_dial {

enum class StreamKind : std::uint32_t {
  coupler = 1,   // reflectivity / MZI theta
  phase = 2,     // component phase shifter
  terminal = 3,  // residual phase of a block
  oracle = 4,    // Ginibre entries for the reference sampler
  coverage = 5,  // fabrication error draws
  jacobian = 6,  // interior test points
  generic = 7,
};

struct StreamId {
  std::uint64_t block_n = 0;
  std::uint64_t index_i = 0;
  StreamKind kind = StreamKind::generic;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ull));
}

/// Derive an independent 64-bit seed from a parent seed and a label.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  return hash_combine(splitmix64(seed), label);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id) : seed_(seed), id_(id) {
    key_ = hash_combine(hash_combine(hash_combine(splitmix64(seed), id.block_n), id.index_i),
                        static_cast<std::uint64_t>(id.kind));
  }

  std::uint64_t seed() const { return seed_; }
  const StreamId& id() const { return id_; }

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one variate per call, the sine branch is discarded).
  double normal() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  /// Complex normal with density exp(-|z|^2)/pi, i.e. E|z|^2 = 1.
  Complex complex_normal() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-std::log(u1));
    return std::polar(radius, kTwoPi * u2);
  }

 private:
  std::uint64_t seed_;
  StreamId id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace haar_dial
