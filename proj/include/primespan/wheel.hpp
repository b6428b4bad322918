#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "primespan/errors.hpp"
#include "primespan/primes.hpp"

namespace primespan {

struct Primorial {
  int z = 0;
  uint64_t P = 1;
  uint64_t phi = 1;
  double phi_ratio = 1.0;  // phi/P exactly representable from the integers
  std::vector<uint32_t> primes;
};

inline Primorial primorial(int z) {
  if (z < 2 || z > 29) throw budget_error("primorial: z must be in [2, 29]");
  Primorial out;
  out.z = z;
  for (uint32_t p : small_primes_upto(static_cast<uint32_t>(z))) {
    out.P *= p;
    out.phi *= p - 1;
    out.primes.push_back(p);
  }
  out.phi_ratio = static_cast<double>(out.phi) / static_cast<double>(out.P);
  return out;
}

namespace detail {

// Coprimality bitset for one full period: bit v says gcd(v, P)=1.
inline std::vector<uint64_t> coprime_bits(const Primorial& pr) {
  size_t words = static_cast<size_t>((pr.P + 63) / 64);
  std::vector<uint64_t> bits(words, ~uint64_t{0});
  for (uint32_t p : pr.primes)
    for (uint64_t v = 0; v < pr.P; v += p) bits[v >> 6] &= ~(uint64_t{1} << (v & 63));
  // mask tail beyond P
  uint64_t tail = pr.P & 63;
  if (tail) bits[words - 1] &= (uint64_t{1} << tail) - 1;
  return bits;
}

inline int bit_at(const std::vector<uint64_t>& bits, uint64_t v) {
  return static_cast<int>((bits[v >> 6] >> (v & 63)) & 1);
}

}  // namespace detail

struct ResidueHistogram {
  int z = 0;
  uint64_t y = 0;
  uint64_t P = 0;
  uint64_t phi = 0;
  double phi_ratio = 0.0;
  std::map<uint64_t, uint64_t> counts;  // N -> C(N)

  // c_N with the exact integer ratio N*P/(phi*y) evaluated in one division.
  double c_value(uint64_t N) const {
    return static_cast<double>(N) * static_cast<double>(P) /
           (static_cast<double>(phi) * static_cast<double>(y));
  }
  uint64_t total() const {
    uint64_t t = 0;
    for (const auto& [N, c] : counts) t += c;
    return t;
  }
  unsigned __int128 weighted_sum() const {
    unsigned __int128 t = 0;
    for (const auto& [N, c] : counts)
      t += static_cast<unsigned __int128>(N) * c;
    return t;
  }
};

// Streamed census for z up to 29: sieves overlapping integer segments with
// the primes <= z instead of materializing the period bitset.  Divisibility
// of n mod P by any p <= z equals divisibility of n itself (p divides P), so
// plain integer sieving reproduces the circular pattern, wrap included.
inline ResidueHistogram residue_window_counts_streamed(
    uint64_t y, int z, uint64_t segment = uint64_t{1} << 22) {
  if (y == 0) throw std::invalid_argument("residue_window_counts: y >= 1");
  if (segment < 64) throw std::invalid_argument("residue_window_counts: segment >= 64");
  Primorial pr = primorial(z);
  ResidueHistogram out;
  out.z = z;
  out.y = y;
  out.P = pr.P;
  out.phi = pr.phi;
  out.phi_ratio = pr.phi_ratio;

  uint64_t base = (y / pr.P) * pr.phi;
  uint64_t yr = y % pr.P;
  if (yr == 0) {
    out.counts[base] = pr.P;
    return out;
  }

  auto sieve_range = [&pr](uint64_t lo, uint64_t hi, std::vector<uint8_t>& v) {
    v.assign(static_cast<size_t>(hi - lo + 1), 1);
    for (uint32_t p : pr.primes)
      for (uint64_t n = ((lo + p - 1) / p) * p; n <= hi; n += p) v[n - lo] = 0;
  };

  const uint64_t cap = uint64_t{1} << 22;
  std::vector<uint64_t> flat;
  bool use_flat = yr + 2 <= cap;
  if (use_flat) flat.assign(static_cast<size_t>(yr + 2), 0);
  std::map<uint64_t, uint64_t> slow;

  std::vector<uint8_t> c;
  sieve_range(1, yr, c);
  uint64_t S = 0;
  for (uint64_t v = 1; v <= yr; ++v) S += c[v - 1];

  for (uint64_t seg_lo = 0; seg_lo < pr.P; seg_lo += segment) {
    uint64_t seg_end = std::min(seg_lo + segment, pr.P);
    // anchors m in [seg_lo, seg_end) leave m+1 and admit m+yr+1
    sieve_range(seg_lo + 1, seg_end + yr, c);
    for (uint64_t m = seg_lo; m < seg_end; ++m) {
      if (use_flat)
        ++flat[static_cast<size_t>(S)];
      else
        ++slow[S];
      S += c[m + yr + 1 - (seg_lo + 1)];
      S -= c[m + 1 - (seg_lo + 1)];
    }
  }
  if (use_flat) {
    for (uint64_t N = 0; N < flat.size(); ++N)
      if (flat[static_cast<size_t>(N)]) out.counts[base + N] = flat[static_cast<size_t>(N)];
  } else {
    for (const auto& [N, c2] : slow) out.counts[base + N] = c2;
  }
  return out;
}

inline ResidueHistogram residue_window_counts(uint64_t y, int z);

// Exact C(N) = #{m mod P : S(m,y,z) = N} by a circular sliding window over
// the coprimality pattern.  Windows are (m, m+y]; y >= P contributes
// floor(y/P)*phi plus the y mod P remainder window.  The streaming opt-in
// trades the in-memory bitset for segment sieving, unlocking z up to 29.
inline ResidueHistogram residue_window_counts(uint64_t y, int z, bool streaming) {
  if (streaming) return residue_window_counts_streamed(y, z);
  return residue_window_counts(y, z);
}

inline ResidueHistogram residue_window_counts(uint64_t y, int z) {
  if (y == 0) throw std::invalid_argument("residue_window_counts: y >= 1");
  Primorial pr = primorial(z);
  if (z > 23)
    throw budget_error("residue_window_counts: z <= 23 in memory; streaming reaches 29");
  ResidueHistogram out;
  out.z = z;
  out.y = y;
  out.P = pr.P;
  out.phi = pr.phi;
  out.phi_ratio = pr.phi_ratio;

  uint64_t base = (y / pr.P) * pr.phi;
  uint64_t yr = y % pr.P;
  if (yr == 0) {
    out.counts[base] = pr.P;
    return out;
  }
  auto bits = detail::coprime_bits(pr);
  // initial window (0, yr]
  uint64_t S = 0;
  for (uint64_t v = 1; v <= yr; ++v) S += detail::bit_at(bits, v % pr.P);

  const uint64_t cap = uint64_t{1} << 22;
  std::vector<uint64_t> flat;
  bool use_flat = yr + 2 <= cap;
  if (use_flat) flat.assign(static_cast<size_t>(yr + 2), 0);
  std::map<uint64_t, uint64_t> slow;

  uint64_t enter = (yr + 1) % pr.P;  // value entering when m -> m+1
  uint64_t leave = 1;                // value leaving
  for (uint64_t m = 0; m < pr.P; ++m) {
    if (use_flat)
      ++flat[static_cast<size_t>(S)];
    else
      ++slow[S];
    S += detail::bit_at(bits, enter);
    S -= detail::bit_at(bits, leave);
    if (++enter == pr.P) enter = 0;
    if (++leave == pr.P) leave = 0;
  }
  if (use_flat) {
    for (uint64_t N = 0; N < flat.size(); ++N)
      if (flat[static_cast<size_t>(N)]) out.counts[base + N] = flat[static_cast<size_t>(N)];
  } else {
    for (const auto& [N, c] : slow) out.counts[base + N] = c;
  }
  return out;
}

inline std::pair<uint64_t, uint64_t> S_extremes(uint64_t y, int z) {
  ResidueHistogram h = residue_window_counts(y, z);
  return {h.counts.begin()->first, h.counts.rbegin()->first};
}

// Direct gcd recount of S(m,y,z); oracle for the sliding window.
inline uint64_t direct_window_count(uint64_t m, uint64_t y, int z) {
  Primorial pr = primorial(z);
  uint64_t S = 0;
  for (uint64_t t = m + 1; t <= m + y; ++t)
    S += std::gcd(t % pr.P, pr.P) == 1 ? 1 : 0;
  return S;
}

enum class Side { minus, plus };

// Finite-z approximant to the normalized extreme window density:
// S_pm(ceil(z^u), z) / (phi_ratio * z^u).
inline double sigma_hat(double u, int z, Side side) {
  double yr = std::pow(static_cast<double>(z), u);
  uint64_t y = static_cast<uint64_t>(std::ceil(yr));
  auto [lo, hi] = S_extremes(y, z);
  Primorial pr = primorial(z);
  uint64_t S = side == Side::plus ? hi : lo;
  return static_cast<double>(S) / (pr.phi_ratio * yr);
}

// Per-residue window counts S(m,y,z) for m in [0, P); the classification
// table for the distribution experiment.  uint16 cells keep z=20 under 20MB.
inline std::vector<uint16_t> wheel_class_table(uint64_t y, int z) {
  Primorial pr = primorial(z);
  if (z > 20) throw budget_error("wheel_class_table: z <= 20 (table memory)");
  if (y % pr.P == 0) throw std::invalid_argument("wheel_class_table: y multiple of P");
  uint64_t base = (y / pr.P) * pr.phi;
  uint64_t yr = y % pr.P;
  if (base + yr > 65535) throw budget_error("wheel_class_table: window count exceeds uint16");
  auto bits = detail::coprime_bits(pr);
  std::vector<uint16_t> table(static_cast<size_t>(pr.P));
  uint64_t S = 0;
  for (uint64_t v = 1; v <= yr; ++v) S += detail::bit_at(bits, v % pr.P);
  uint64_t enter = (yr + 1) % pr.P, leave = 1;
  for (uint64_t m = 0; m < pr.P; ++m) {
    table[static_cast<size_t>(m)] = static_cast<uint16_t>(base + S);
    S += detail::bit_at(bits, enter);
    S -= detail::bit_at(bits, leave);
    if (++enter == pr.P) enter = 0;
    if (++leave == pr.P) leave = 0;
  }
  return table;
}

struct FixedPointRow {
  uint64_t n = 0;
  uint64_t R = 0;
  double prediction = 0.0;       // with constants quoted to 2 decimals
  double prediction_full = 0.0;  // full-precision constants
};

struct FixedPointTraceRow {
  int iter = 0;
  uint64_t y = 0;
  uint64_t argmax_n = 0;
  double prediction = 0.0;
};

struct FixedPointResult {
  uint64_t y_star = 0;
  bool converged = false;
  std::pair<uint64_t, uint64_t> oscillation{0, 0};
  std::vector<FixedPointTraceRow> trace;
  std::vector<FixedPointRow> table;
  double L = 0.0;        // phi_ratio * logx
  double L_prime = 0.0;  // 1/(-log(1-1/L)), or L when the refinement is off
  double A_full = 0.0;   // (P/phi) * L_prime
  double B_full = 0.0;   // log(x/P)
};

// Iterates y <- floor(max_n (y/n) L' (log(x/P) + log R_y(n))) to a fixed
// point.  The reported table quotes the two constants rounded to 2 decimals,
// which is how the reference tabulation printed its prediction column; the
// iteration itself uses full precision.
inline FixedPointResult gap_prediction_fixed_point(double logx, int z, uint64_t y0,
                                                   bool refine_L_prime = true,
                                                   int max_iter = 20) {
  if (y0 < 2) throw std::invalid_argument("gap_prediction_fixed_point: y0 >= 2");
  if (z > 23) throw budget_error("gap_prediction_fixed_point: z <= 23");
  Primorial pr = primorial(z);
  FixedPointResult out;
  out.L = pr.phi_ratio * logx;
  out.L_prime = refine_L_prime ? 1.0 / (-std::log1p(-1.0 / out.L)) : out.L;
  out.A_full = out.L_prime / pr.phi_ratio;
  out.B_full = logx - std::log(static_cast<double>(pr.P));

  uint64_t y = y0, y_prev = 0;
  for (int it = 0; it < max_iter; ++it) {
    ResidueHistogram h = residue_window_counts(y, z);
    double best = -1.0;
    uint64_t best_n = 0;
    for (const auto& [n, R] : h.counts) {
      if (n == 0) continue;
      double pred = (static_cast<double>(y) / static_cast<double>(n)) * out.L_prime *
                    (out.B_full + std::log(static_cast<double>(R)));
      if (pred > best) {
        best = pred;
        best_n = n;
      }
    }
    out.trace.push_back(FixedPointTraceRow{it, y, best_n, best});
    uint64_t y_next = static_cast<uint64_t>(std::floor(best));
    if (y_next == y) {
      out.converged = true;
      out.y_star = y;
      break;
    }
    if (y_next == y_prev) {  // 2-cycle: report the pair
      out.oscillation = {y, y_next};
      out.y_star = std::min(y, y_next);
      break;
    }
    y_prev = y;
    y = y_next;
  }
  if (!out.converged && out.oscillation.first == 0) out.y_star = y;  // iteration cap

  // Final table at y_star with display-precision constants.
  ResidueHistogram h = residue_window_counts(out.y_star, z);
  double A2 = std::round(out.A_full * 100.0) / 100.0;
  double B2 = std::round(out.B_full * 100.0) / 100.0;
  for (const auto& [n, R] : h.counts) {
    if (n == 0 || R == 0) continue;
    double inv_c = pr.phi_ratio * static_cast<double>(out.y_star) / static_cast<double>(n);
    FixedPointRow row;
    row.n = n;
    row.R = R;
    row.prediction = A2 * inv_c * (B2 + std::log(static_cast<double>(R)));
    row.prediction_full = (static_cast<double>(out.y_star) / static_cast<double>(n)) *
                          out.L_prime * (out.B_full + std::log(static_cast<double>(R)));
    out.table.push_back(row);
  }
  return out;
}

}  // namespace primespan
