#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace primespan {

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<uint32_t> small_primes_upto(uint32_t n) {
  std::vector<uint32_t> out;
  if (n < 2) return out;
  std::vector<uint8_t> is(n + 1, 1);
  is[0] = is[1] = 0;
  for (uint32_t p = 2; static_cast<uint64_t>(p) * p <= n; ++p)
    if (is[p])
      for (uint64_t q = static_cast<uint64_t>(p) * p; q <= n; q += p) is[q] = 0;
  for (uint32_t i = 2; i <= n; ++i)
    if (is[i]) out.push_back(i);
  return out;
}

// Streams the primes in (lo, hi] in ascending order through f(p).
// Odd-only segmented sieve; segment_bits odd candidates per segment.
template <class F>
void for_each_prime(uint64_t lo, uint64_t hi, F&& f,
                    size_t segment_bits = (1u << 22)) {
  if (hi <= lo) return;
  if (lo < 2 && hi >= 2) f(uint64_t{2});
  uint64_t start = lo < 2 ? 3 : lo + 1;  // first candidate value
  if (start > hi) return;
  if ((start & 1) == 0) ++start;
  if (start > hi) return;

  uint32_t root = static_cast<uint32_t>(std::sqrt(static_cast<double>(hi))) + 2;
  std::vector<uint32_t> base = small_primes_upto(root);

  std::vector<uint8_t> seg(segment_bits, 1);
  for (uint64_t seg_lo = start; seg_lo <= hi; seg_lo += 2 * segment_bits) {
    // candidates seg_lo, seg_lo+2, ..., covering count odd values
    uint64_t count = (hi - seg_lo) / 2 + 1;
    if (count > segment_bits) count = segment_bits;
    uint64_t seg_end = seg_lo + 2 * (count - 1);
    std::memset(seg.data(), 1, count);
    for (uint32_t p : base) {
      if (p == 2) continue;
      uint64_t p2 = static_cast<uint64_t>(p) * p;
      if (p2 > seg_end) break;
      uint64_t first = p2;
      if (first < seg_lo) {
        uint64_t k = (seg_lo + p - 1) / p;
        if ((k & 1) == 0) ++k;  // odd multiples only
        first = k * p;
      }
      for (uint64_t q = first; q <= seg_end; q += 2 * p) seg[(q - seg_lo) / 2] = 0;
    }
    for (uint64_t i = 0; i < count; ++i)
      if (seg[i]) f(seg_lo + 2 * i);
  }
}

// Materializes primes in (lo, hi]; guarded because wide ranges belong to the
// streaming interface.
inline std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi,
                                             uint64_t max_span = (1ull << 30)) {
  if (hi <= lo) throw std::invalid_argument("primes_in_range: need lo < hi");
  if (hi - lo > max_span)
    throw resource_error("primes_in_range: span too large; use for_each_prime");
  std::vector<uint64_t> out;
  out.reserve(static_cast<size_t>((hi - lo) / (std::log(static_cast<double>(hi)) - 1.0) + 16));
  for_each_prime(lo, hi, [&](uint64_t p) { out.push_back(p); });
  return out;
}

inline uint64_t count_primes(uint64_t lo, uint64_t hi) {
  uint64_t n = 0;
  for_each_prime(lo, hi, [&](uint64_t) { ++n; });
  return n;
}

namespace detail {
inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}
inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}
}  // namespace detail

// Deterministic Miller-Rabin for 64-bit inputs; used by recount checks.
inline bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                     29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                     29ull, 31ull, 37ull}) {
    uint64_t x = detail::powmod_u64(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// Direct recount of pi(X+y) - pi(X) used to cross-check sliding scans.
inline uint64_t recount_window(uint64_t X, uint64_t y) {
  uint64_t c = 0;
  for (uint64_t v = X + 1; v <= X + y; ++v)
    if (is_prime_u64(v)) ++c;
  return c;
}

}  // namespace primespan
