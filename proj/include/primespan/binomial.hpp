#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace primespan {

// B(N, 1/L): N independent trials with success probability 1/L.
struct BinomialSpec {
  int64_t N = 0;
  double L = 2.0;
};

inline void check_spec(const BinomialSpec& s) {
  if (s.N < 0 || !(s.L > 1.0))
    throw std::domain_error("binomial: need N >= 0 and L > 1");
}

inline double binom_log_pmf(const BinomialSpec& s, int64_t k) {
  check_spec(s);
  if (k < 0 || k > s.N) throw std::domain_error("binom_log_pmf: k outside [0, N]");
  double N = static_cast<double>(s.N), kd = static_cast<double>(k);
  return std::lgamma(N + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(N - kd + 1.0) -
         kd * std::log(s.L) + (N - kd) * std::log1p(-1.0 / s.L);
}

inline double binom_pmf(const BinomialSpec& s, int64_t k) {
  return std::exp(binom_log_pmf(s, k));
}

namespace detail {

// Sum of pmf over [a, b] in units of the peak term, walking outward from the
// in-range mode with the pmf ratio recurrence and truncating negligible
// terms.  Returns log of the sum; exact to double precision.
inline double log_pmf_sum(const BinomialSpec& s, int64_t a, int64_t b) {
  if (a > b) return -std::numeric_limits<double>::infinity();
  double q = 1.0 / (s.L - 1.0);  // pmf(j+1)/pmf(j) = (N-j)/(j+1) * q
  int64_t mode = static_cast<int64_t>(std::floor((static_cast<double>(s.N) + 1.0) / s.L));
  int64_t peak = mode < a ? a : (mode > b ? b : mode);
  double lm = binom_log_pmf(s, peak);
  double total = 1.0;  // the peak term
  double t = 1.0;
  for (int64_t j = peak; j > a; --j) {  // term j-1 from term j
    t *= static_cast<double>(j) / (static_cast<double>(s.N - j + 1) * q);
    total += t;
    if (t < 1e-30 * total) break;
  }
  t = 1.0;
  for (int64_t j = peak; j < b; ++j) {  // term j+1 from term j
    t *= static_cast<double>(s.N - j) * q / static_cast<double>(j + 1);
    total += t;
    if (t < 1e-30 * total) break;
  }
  return lm + std::log(total);
}

}  // namespace detail

// log P(Y >= k); k <= 0 gives log 1 = 0, k > N gives -inf.
inline double binom_log_tail_ge(const BinomialSpec& s, int64_t k) {
  check_spec(s);
  if (k <= 0) return 0.0;
  if (k > s.N) return -std::numeric_limits<double>::infinity();
  double direct = detail::log_pmf_sum(s, k, s.N);
  if (direct < -0.2) return direct;  // small tail: the sum is the stable side
  // Large tail: complement is the smaller sum.
  double comp = detail::log_pmf_sum(s, 0, k - 1);
  return std::log1p(-std::exp(comp));
}

// log P(Y < k); k <= 0 gives -inf, k > N gives log 1 = 0.
inline double binom_log_tail_lt(const BinomialSpec& s, int64_t k) {
  check_spec(s);
  if (k <= 0) return -std::numeric_limits<double>::infinity();
  if (k > s.N) return 0.0;
  double direct = detail::log_pmf_sum(s, 0, k - 1);
  if (direct < -0.2) return direct;
  double comp = detail::log_pmf_sum(s, k, s.N);
  return std::log1p(-std::exp(comp));
}

inline double binom_tail_ge(const BinomialSpec& s, int64_t k) {
  return std::exp(binom_log_tail_ge(s, k));
}
inline double binom_tail_lt(const BinomialSpec& s, int64_t k) {
  return std::exp(binom_log_tail_lt(s, k));
}

inline double binom_mean(const BinomialSpec& s) { return static_cast<double>(s.N) / s.L; }
inline double binom_variance(const BinomialSpec& s) {
  return static_cast<double>(s.N) / s.L * (1.0 - 1.0 / s.L);
}

enum class TailSide { minus, plus };

// Definitionally exact thresholds against the 1/x budget:
//   plus : smallest k with P(Y >= k) <= 1/x  (can be N+1)
//   minus: largest  k with P(Y <  k) <= 1/x  (at least 0)
inline int64_t k_exact_logx(const BinomialSpec& s, double logx, TailSide side) {
  check_spec(s);
  if (!(logx > 0.0)) throw std::domain_error("k_exact: x > 1 required");
  if (side == TailSide::plus) {
    int64_t lo = 0, hi = s.N + 1;  // predicate false at lo, true at hi
    if (binom_log_tail_ge(s, lo) <= -logx) return lo;
    while (hi - lo > 1) {
      int64_t mid = lo + (hi - lo) / 2;
      if (binom_log_tail_ge(s, mid) <= -logx)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }
  int64_t lo = 0, hi = s.N + 1;  // predicate true at lo, false at hi
  if (binom_log_tail_lt(s, hi) <= -logx) return s.N;
  while (hi - lo > 1) {
    int64_t mid = lo + (hi - lo) / 2;
    if (binom_log_tail_lt(s, mid) <= -logx)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

inline int64_t k_exact(const BinomialSpec& s, double x, TailSide side) {
  return k_exact_logx(s, std::log(x), side);
}

}  // namespace primespan
