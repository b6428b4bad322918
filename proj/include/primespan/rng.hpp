#pragma once

#include <cstdint>

namespace primespan {

// Counter-based generator: every output word is a pure function of
// (seed, stream, counter), so parallel consumers can draw from disjoint
// streams in any order and still reproduce a serial run bit for bit.
// The mixer is the splitmix64 finalizer; a stream picks a derived key,
// and the counter walks a Weyl sequence under that key.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t stream_key(uint64_t stream) const {
    return mix64(seed_ ^ (0x9E3779B97F4A7C15ull * stream + 0x8BB84B93962EACC9ull));
  }

  static uint64_t word_from_key(uint64_t key, uint64_t counter) {
    return mix64(key + 0x9E3779B97F4A7C15ull * counter);
  }

  uint64_t word(uint64_t stream, uint64_t counter) const {
    return word_from_key(stream_key(stream), counter);
  }

  // Uniform in [0,1) with 53 random bits.
  static double unit_from_key(uint64_t key, uint64_t counter) {
    return static_cast<double>(word_from_key(key, counter) >> 11) * 0x1.0p-53;
  }

  double unit(uint64_t stream, uint64_t counter) const {
    return unit_from_key(stream_key(stream), counter);
  }

  // Uniform integer in [0, n) by rejection-free 128-bit scaling; the tiny
  // modulo bias (< 2^-64 * n) is irrelevant for sampling test windows.
  uint64_t below(uint64_t stream, uint64_t counter, uint64_t n) const {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(word(stream, counter)) * n) >> 64);
  }

 private:
  uint64_t seed_;
};

}  // namespace primespan
