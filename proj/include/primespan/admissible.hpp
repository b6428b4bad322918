#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "primespan/errors.hpp"
#include "primespan/primes.hpp"

namespace primespan {

struct ResidueWitness {
  uint64_t p = 0;
  uint64_t free_class = 0;
};

struct AdmissibleTuple {
  std::vector<int64_t> offsets;  // sorted distinct
  int64_t y = 0;                 // interval length the offsets live in
  int64_t translate = 0;         // original values = offsets + translate
  std::vector<ResidueWitness> certificate;
};

struct AdmissibleCheck {
  bool admissible = false;
  std::vector<ResidueWitness> certificate;  // one free class per prime <= k
  uint64_t blocking_prime = 0;              // set when inadmissible
};

namespace detail {

inline uint64_t mod_pos(int64_t v, uint64_t p) {
  int64_t r = v % static_cast<int64_t>(p);
  return static_cast<uint64_t>(r < 0 ? r + static_cast<int64_t>(p) : r);
}

}  // namespace detail

// Only primes p <= k can block: k distinct values cannot cover p > k classes.
inline AdmissibleCheck is_admissible(const std::vector<int64_t>& offsets) {
  AdmissibleCheck out;
  std::set<int64_t> uniq(offsets.begin(), offsets.end());
  if (uniq.size() != offsets.size())
    throw std::invalid_argument("is_admissible: offsets must be distinct");
  uint64_t k = offsets.size();
  for (uint64_t p : small_primes_upto(k)) {
    std::vector<char> hit(p, 0);
    for (int64_t t : offsets) hit[detail::mod_pos(t, p)] = 1;
    uint64_t free_class = p;
    for (uint64_t r = 0; r < p; ++r)
      if (!hit[r]) { free_class = r; break; }
    if (free_class == p) {
      out.blocking_prime = p;
      out.certificate.clear();
      return out;
    }
    out.certificate.push_back({p, free_class});
  }
  out.admissible = true;
  return out;
}

struct ExactSResult {
  int64_t S = 0;
  AdmissibleTuple witness;
};

namespace detail {

// #{s in [t, y] : s mod p == r}
inline int64_t class_count(int64_t t, int64_t y, int64_t p, int64_t r) {
  if (t > y) return 0;
  auto upto = [&](int64_t n) { return n < r ? int64_t{0} : (n - r) / p + 1; };
  return upto(y) - upto(t - 1);
}

struct SSearch {
  int64_t y;
  std::vector<int64_t> primes;          // all primes <= y, ascending
  std::vector<std::vector<int>> cnt;    // occupancy per prime per class
  std::vector<int> distinct;            // distinct classes used per prime
  std::vector<int64_t> chosen;
  std::vector<int64_t> best_set;
  int64_t best = 0;

  explicit SSearch(int64_t y_) : y(y_) {
    for (uint64_t p : small_primes_upto(static_cast<uint64_t>(y))) primes.push_back(p);
    cnt.resize(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) cnt[i].assign(primes[i], 0);
    distinct.assign(primes.size(), 0);
  }

  bool push(int64_t t) {
    chosen.push_back(t);
    // Occupancy always covers every tracked prime: elements chosen while the
    // set was small still count once the size reaches p.
    for (std::size_t i = 0; i < primes.size(); ++i) {
      int64_t r = t % primes[i];
      if (cnt[i][r]++ == 0) ++distinct[i];
    }
    // A prime is binding only once the set size reaches it.
    for (std::size_t i = 0; i < primes.size() && primes[i] <= static_cast<int64_t>(chosen.size()); ++i)
      if (distinct[i] == primes[i]) return false;
    return true;
  }

  void pop(int64_t t) {
    for (std::size_t i = 0; i < primes.size(); ++i) {
      int64_t r = t % primes[i];
      if (--cnt[i][r] == 0) --distinct[i];
    }
    chosen.pop_back();
  }

  // Optimistic completion size from residue availability over [t, y] for the
  // primes already binding; exact counting for the occupied classes plus the
  // best still-openable ones.
  int64_t upper_bound(int64_t t) const {
    int64_t k = static_cast<int64_t>(chosen.size());
    int64_t bound = k + (y - t + 1);
    for (std::size_t i = 0; i < primes.size(); ++i) {
      int64_t p = primes[i];
      if (p > k || p > 13) break;
      int64_t open = p - 1 - distinct[i];
      int64_t avail = 0;
      std::vector<int64_t> fresh;
      for (int64_t r = 0; r < p; ++r) {
        int64_t c = class_count(t, y, p, r);
        if (cnt[i][r] > 0)
          avail += c;
        else
          fresh.push_back(c);
      }
      std::sort(fresh.begin(), fresh.end(), std::greater<int64_t>());
      for (int64_t j = 0; j < open && j < static_cast<int64_t>(fresh.size()); ++j)
        avail += fresh[j];
      bound = std::min(bound, k + avail);
    }
    return bound;
  }

  void dfs(int64_t t) {
    if (static_cast<int64_t>(chosen.size()) > best) {
      best = static_cast<int64_t>(chosen.size());
      best_set = chosen;
    }
    if (t > y || upper_bound(t) <= best) return;
    if (push(t)) dfs(t + 1);
    pop(t);
    // Skipping t: the plain count bound shrinks by one.
    if (static_cast<int64_t>(chosen.size()) + (y - t) > best) dfs(t + 1);
  }
};

}  // namespace detail

inline ExactSResult exact_S(int64_t y, int64_t y_max = 100) {
  if (y < 1) throw std::domain_error("exact_S: y >= 1 required");
  if (y > y_max)
    throw budget_error("exact_S: y exceeds the search budget; use greedy_S_lower");
  detail::SSearch search(y);
  search.dfs(1);
  ExactSResult out;
  out.S = search.best;
  out.witness.offsets = search.best_set;
  out.witness.y = y;
  out.witness.translate = 0;
  out.witness.certificate = is_admissible(search.best_set).certificate;
  return out;
}

enum class GreedyStrategy { primes_in_y_2y, schinzel_sieve };

inline AdmissibleTuple greedy_S_lower(int64_t y, GreedyStrategy strategy) {
  if (y < 2) throw std::domain_error("greedy_S_lower: y >= 2 required");
  AdmissibleTuple out;
  out.y = y;
  if (strategy == GreedyStrategy::primes_in_y_2y) {
    // Primes in (y, 2y], shifted down by y: none is divisible by any p <= y,
    // so class 0 is free for every prime that could bind.
    out.translate = y;
    for_each_prime(static_cast<uint64_t>(y), static_cast<uint64_t>(2 * y),
                   [&](uint64_t p) { out.offsets.push_back(static_cast<int64_t>(p) - y); });
  } else {
    // Keep integers in [1, y] free of prime factors <= T, growing T until the
    // survivors are admissible.  T past the largest prime <= y always works.
    auto primes = small_primes_upto(static_cast<uint64_t>(y));
    for (std::size_t ti = 0; ti <= primes.size(); ++ti) {
      uint64_t T = ti == 0 ? 1 : primes[ti - 1];
      std::vector<int64_t> cand;
      for (int64_t n = 1; n <= y; ++n) {
        bool ok = true;
        for (uint64_t p : primes) {
          if (p > T) break;
          if (n % static_cast<int64_t>(p) == 0) { ok = false; break; }
        }
        if (ok) cand.push_back(n);
      }
      auto chk = is_admissible(cand);
      if (chk.admissible) {
        out.offsets = std::move(cand);
        out.certificate = chk.certificate;
        return out;
      }
    }
    throw std::logic_error("greedy_S_lower: sieve construction failed");  // unreachable
  }
  out.certificate = is_admissible(out.offsets).certificate;
  return out;
}

struct SBounds {
  int64_t lower = 0;
  int64_t upper = 0;
};

// CSV rows y,lower,upper; # comments and an optional header line allowed.
inline std::map<int64_t, SBounds> load_S_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("load_S_table: cannot open " + path);
  std::map<int64_t, SBounds> table;
  std::string line;
  int64_t lineno = 0;
  bool saw_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line.substr(0, line.find('#'));
    auto is_space = [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; };
    while (!body.empty() && is_space(body.back())) body.pop_back();
    std::size_t start = 0;
    while (start < body.size() && is_space(body[start])) ++start;
    body = body.substr(start);
    if (body.empty()) continue;
    if (!saw_content && body.find_first_not_of("0123456789,") != std::string::npos) {
      saw_content = true;
      if (body == "y,lower,upper") continue;
      throw parse_error("load_S_table: unrecognized header at line " + std::to_string(lineno));
    }
    saw_content = true;
    std::istringstream ss(body);
    std::string f1, f2, f3, extra;
    if (!std::getline(ss, f1, ',') || !std::getline(ss, f2, ',') || !std::getline(ss, f3, ','))
      throw parse_error("load_S_table: need y,lower,upper at line " + std::to_string(lineno));
    if (std::getline(ss, extra, ','))
      throw parse_error("load_S_table: too many fields at line " + std::to_string(lineno));
    int64_t y, lo, hi;
    try {
      y = std::stoll(f1);
      lo = std::stoll(f2);
      hi = std::stoll(f3);
    } catch (const std::exception&) {
      throw parse_error("load_S_table: non-integer field at line " + std::to_string(lineno));
    }
    if (y < 1 || lo < 0 || lo > hi)
      throw parse_error("load_S_table: bound order violated at line " + std::to_string(lineno));
    if (!table.emplace(y, SBounds{lo, hi}).second)
      throw parse_error("load_S_table: duplicate y at line " + std::to_string(lineno));
  }
  return table;
}

// Exact values override ingested rows wherever the search budget reaches.
inline SBounds lookup_S(int64_t y, const std::map<int64_t, SBounds>& table,
                        int64_t exact_limit = 24) {
  if (y >= 1 && y <= exact_limit) {
    int64_t s = exact_S(y, exact_limit).S;
    return {s, s};
  }
  auto it = table.find(y);
  if (it == table.end()) throw std::out_of_range("lookup_S: no row for this y");
  return it->second;
}

struct SingularSeries {
  std::vector<int64_t> offsets;
  uint64_t cutoff = 0;
  double value = 0.0;       // 0 signals an inadmissible tuple
  double tail_bound = 0.0;  // |log correction| bound for primes past the cutoff
  bool admissible = false;
};

// Truncated Euler product prod_p (1-1/p)^{-k} (1-omega(p)/p) in log space.
inline SingularSeries singular_series(const std::vector<int64_t>& offsets,
                                      uint64_t cutoff = 1000000) {
  SingularSeries out;
  out.offsets = offsets;
  out.cutoff = cutoff;
  if (offsets.empty()) throw std::invalid_argument("singular_series: empty tuple");
  auto [mn, mx] = std::minmax_element(offsets.begin(), offsets.end());
  uint64_t span = static_cast<uint64_t>(*mx - *mn);
  if (cutoff < std::max<uint64_t>(span, 2))
    throw std::domain_error("singular_series: cutoff must reach the offset span");
  auto chk = is_admissible(offsets);
  if (!chk.admissible) return out;  // value 0 by construction
  out.admissible = true;
  double k = static_cast<double>(offsets.size());
  double sum = 0.0, comp = 0.0;  // Kahan
  std::vector<char> hit;
  for (uint64_t p : small_primes_upto(cutoff)) {
    uint64_t omega;
    if (p > span) {
      omega = offsets.size();  // all residues distinct past the span
    } else {
      hit.assign(p, 0);
      omega = 0;
      for (int64_t t : offsets) {
        uint64_t r = detail::mod_pos(t, p);
        if (!hit[r]) { hit[r] = 1; ++omega; }
      }
    }
    double pd = static_cast<double>(p);
    double term = -k * std::log1p(-1.0 / pd) + std::log1p(-static_cast<double>(omega) / pd);
    double yk = term - comp;
    double tk = sum + yk;
    comp = (tk - sum) - yk;
    sum = tk;
  }
  out.value = std::exp(sum);
  out.tail_bound = k * k / static_cast<double>(cutoff);
  return out;
}

inline double hl_count_estimate(double x, const std::vector<int64_t>& offsets,
                                uint64_t cutoff = 1000000) {
  auto [mn, mx] = std::minmax_element(offsets.begin(), offsets.end());
  if (!(x > static_cast<double>(*mx)))
    throw std::domain_error("hl_count_estimate: x > max offset required");
  auto s = singular_series(offsets, cutoff);
  double k = static_cast<double>(offsets.size());
  return s.value * x / std::pow(std::log(x), k);
}

}  // namespace primespan
