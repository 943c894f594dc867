// Counter-based random streams. Every draw is a pure function of
// (seed, domain, round, node, draw), so any value can be recomputed in
// isolation: replay does not depend on call order, and per-node work can be
// parallelized or restarted without carrying generator state around.
#pragma once

#include <cstdint>

namespace rgossip {

// Stream domains keep independent uses of the same run seed uncorrelated.
enum class StreamDomain : uint64_t {
  partner = 0,         // partner selection draws
  coin = 1,            // per-node Bernoulli coins
  init = 2,            // initial value generation
  adversary_set = 3,   // corrupted-set sampling
  adversary_value = 4, // per-edge adversarial values
};

namespace detail {

inline uint64_t mum(uint64_t a, uint64_t b) {
  __uint128_t r = static_cast<__uint128_t>(a) * b;
  return static_cast<uint64_t>(r) ^ static_cast<uint64_t>(r >> 64);
}

inline constexpr uint64_t rk0 = 0xa0761d6478bd642full;
inline constexpr uint64_t rk1 = 0xe7037ed1a0b428dbull;
inline constexpr uint64_t rk2 = 0x8ebc6af09c88c6e3ull;
inline constexpr uint64_t rk3 = 0x589965cc75374cc3ull;
inline constexpr uint64_t rk4 = 0xbf58476d1ce4e5b9ull;
inline constexpr uint64_t rk5 = 0x94d049bb133111ebull;

} // namespace detail

// 64-bit word for one (seed, domain, round, node, draw) tuple. Three mum
// stages: multiply seed against node, fold the (round, domain, draw) counter
// against that entropy, then a wyrand-style finalizer.
//
// Two structural constraints, each once violated and caught by tests: seed
// and node must not meet by XOR inside one multiplicand (mum(k, node ^ seed)
// satisfies stream(seed, node) == stream(0, node ^ seed), so a seed change
// only relabels node streams and whole-population statistics go
// seed-invariant), and the counter needs its own multiply against mixed
// entropy before the finalizer (a fixed per-node multiplicand times a
// low-entropy counter leaves round-to-round draws of one node correlated).
//
// draw must be < 32 and domain < 8; round and node are unrestricted in
// practice (round < 2^53, node < 2^32).
inline uint64_t derive_stream(uint64_t seed, StreamDomain domain, uint64_t round,
                              uint64_t node, uint64_t draw) {
  using namespace detail;
  uint64_t key = (round << 8) | (static_cast<uint64_t>(domain) << 5) | draw;
  uint64_t s = mum(seed ^ rk0, node ^ rk1);
  s = mum(s ^ rk2, key ^ rk3);
  return mum(s ^ rk4, s ^ rk5);
}

// Maps a word to [0, n) by the fixed-point multiply trick. Bias is at most
// n / 2^64 per bucket, far below anything the simulations can resolve.
inline uint64_t bounded(uint64_t word, uint64_t n) {
  return static_cast<uint64_t>(
      (static_cast<__uint128_t>(word) * static_cast<__uint128_t>(n)) >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double u01(uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

} // namespace rgossip
