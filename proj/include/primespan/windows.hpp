#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "primespan/errors.hpp"
#include "primespan/primes.hpp"

namespace primespan {

struct PrimeWindowStats {
  uint64_t x = 0;
  uint64_t y = 0;
  uint64_t M = 0;
  uint64_t m = 0;
  uint64_t argmax_X = 0;
  uint64_t argmin_X = 0;
};

struct GapRecord {
  uint64_t p = 0;
  uint64_t gap = 0;
  double ratio = 0.0;  // gap / (log p)^2
};

// Single-pass sliding extremes over an ascending stream of "prime" positions
// in (x, 2x + max y].  Window anchors X are integers in (x, 2x], windows are
// half open (X, X+y].  Several window lengths share one stream pass.
//
// Candidate anchors suffice for exactness (smallest-witness arguments):
//   max: X = x+1 or X = p - y  (count can only rise when a prime enters at
//        the right edge, so c(X-1) < c(X) forces X+y prime)
//   min: X = x+1 or X = p      (count can only fall when a prime leaves at
//        the left edge, so c(X-1) > c(X) forces X prime)
// Candidates are evaluated in ascending X order with strict improvement, so
// the recorded witnesses are the smallest ones.
class WindowScanner {
 public:
  WindowScanner(uint64_t x, const std::vector<uint64_t>& ys) : x_(x) {
    if (ys.empty()) throw std::invalid_argument("window extremes: no window lengths");
    for (uint64_t y : ys) {
      if (y == 0) throw std::invalid_argument("window extremes: y must be >= 1");
      states_.push_back(State{y});
    }
  }

  uint64_t max_y() const {
    uint64_t m = 0;
    for (const auto& s : states_) m = std::max(m, s.y);
    return m;
  }

  // p strictly increasing, p > x, p <= 2x + max_y().
  void push(uint64_t p) {
    int64_t j = base_ + static_cast<int64_t>(buf_.size());
    buf_.push_back(p);
    for (auto& s : states_) step(s, j, p);
    trim();
  }

  std::vector<PrimeWindowStats> finish() {
    for (auto& s : states_) {
      // Remaining min-candidates close against the complete stream.
      finalize_pending(s, std::numeric_limits<uint64_t>::max());
      if (!s.init_done) close_initial(s);
    }
    std::vector<PrimeWindowStats> out;
    out.reserve(states_.size());
    for (const auto& s : states_) {
      PrimeWindowStats w;
      w.x = x_;
      w.y = s.y;
      w.M = s.bestM;
      w.argmax_X = s.argmax;
      w.m = s.bestm;
      w.argmin_X = s.argmin;
      out.push_back(w);
    }
    return out;
  }

 private:
  struct State {
    uint64_t y;
    // max side
    int64_t loM = 0;  // smallest index with value > p_j - y
    uint64_t bestM = 0;
    uint64_t argmax = 0;
    bool haveM = false;
    // min side
    int64_t pend = 0;    // next stream index to use as a min-candidate
    int64_t up = -1;     // largest index known with value <= candidate + y
    uint64_t bestm = std::numeric_limits<uint64_t>::max();
    uint64_t argmin = 0;
    bool havem = false;
    bool init_done = false;  // the X = x+1 candidate
  };

  uint64_t at(int64_t idx) const { return buf_[static_cast<size_t>(idx - base_)]; }
  int64_t head() const { return base_ + static_cast<int64_t>(buf_.size()) - 1; }

  void consider_max(State& s, uint64_t X, uint64_t count) {
    if (!s.haveM || count > s.bestM) {
      s.bestM = count;
      s.argmax = X;
      s.haveM = true;
    }
  }
  void consider_min(State& s, uint64_t X, uint64_t count) {
    if (!s.havem || count < s.bestm) {
      s.bestm = count;
      s.argmin = X;
      s.havem = true;
    }
  }

  // Count for the fixed anchor X = x+1 once the stream passes x+1+y.
  void close_initial(State& s) {
    uint64_t X = x_ + 1;
    uint64_t hi = X + s.y;
    int64_t u = base_ - 1;
    // init candidates are evaluated before any trim (see trim()), so a scan
    // from the buffer start is exact.
    for (int64_t i = base_; i <= head(); ++i) {
      if (at(i) > hi) break;
      u = i;
    }
    int64_t first = base_;
    while (first <= head() && at(first) <= X) ++first;
    uint64_t count = u >= first ? static_cast<uint64_t>(u - first + 1) : 0;
    consider_max(s, X, count);
    consider_min(s, X, count);
    s.init_done = true;
  }

  void finalize_pending(State& s, uint64_t head_value) {
    while (s.pend <= head()) {
      uint64_t a = at(s.pend);
      if (a > 2 * x_) {  // anchors beyond the range are not candidates
        ++s.pend;
        continue;
      }
      if (head_value != std::numeric_limits<uint64_t>::max() && a + s.y >= head_value)
        break;  // future primes could still land in (a, a+y]
      if (s.up < s.pend) s.up = s.pend;
      while (s.up + 1 <= head() && at(s.up + 1) <= a + s.y) ++s.up;
      consider_min(s, a, static_cast<uint64_t>(s.up - s.pend));
      ++s.pend;
    }
  }

  void step(State& s, int64_t j, uint64_t p) {
    if (!s.init_done && p > x_ + 1 + s.y) close_initial(s);
    // max candidate X = p - y, valid while the anchor stays inside (x, 2x]
    if (p > s.y && p - s.y > x_ && p - s.y <= 2 * x_) {
      uint64_t X = p - s.y;
      while (s.loM <= j && at(s.loM) <= X) ++s.loM;
      consider_max(s, X, static_cast<uint64_t>(j - s.loM + 1));
    }
    finalize_pending(s, p);
  }

  void trim() {
    // Keep everything any state may still read: min-candidates not yet
    // finalized and the initial-window scan (which needs the buffer start
    // until x+1+max_y has been passed).
    int64_t keep = head();
    uint64_t ymax = 0;
    for (const auto& s : states_) {
      keep = std::min(keep, s.pend);
      keep = std::min(keep, s.loM);
      if (!s.init_done) keep = base_;
      ymax = std::max(ymax, s.y);
    }
    uint64_t p_cur = at(head());
    while (base_ < keep && !buf_.empty() && buf_.front() + ymax + 2 < p_cur) {
      buf_.pop_front();
      ++base_;
    }
  }

  uint64_t x_;
  std::vector<State> states_;
  std::deque<uint64_t> buf_;
  int64_t base_ = 0;
};

// Exact M(x,y), m(x,y) with smallest witnesses for each y, one sieve pass.
inline std::vector<PrimeWindowStats> window_extremes(uint64_t x,
                                                     std::vector<uint64_t> ys) {
  WindowScanner scan(x, ys);
  for_each_prime(x, 2 * x + scan.max_y(), [&](uint64_t p) { scan.push(p); });
  return scan.finish();
}

// Extremes over an arbitrary ascending positions vector (synthetic sequences).
inline std::vector<PrimeWindowStats> extremes_from_sorted(
    const std::vector<uint64_t>& positions, uint64_t x,
    const std::vector<uint64_t>& ys) {
  WindowScanner scan(x, ys);
  uint64_t hi = 2 * x + scan.max_y();
  for (uint64_t p : positions) {
    if (p <= x) continue;
    if (p > hi) break;
    scan.push(p);
  }
  return scan.finish();
}

// Record gaps: every prime p <= limit whose gap to the next prime strictly
// exceeds all earlier gaps.
inline std::vector<GapRecord> max_gap_records(uint64_t limit) {
  if (limit < 3) throw std::invalid_argument("max_gap_records: limit >= 3 required");
  std::vector<GapRecord> records;
  uint64_t prev = 0, best = 0;
  // Slack so the record opened by the last prime <= limit can close; 2000
  // covers every gap below 4e9 many times over.
  uint64_t hi = limit + 2000;
  for_each_prime(1, hi, [&](uint64_t p) {
    if (prev != 0 && prev <= limit) {
      uint64_t gap = p - prev;
      if (gap > best) {
        best = gap;
        double lp = std::log(static_cast<double>(prev));
        records.push_back(GapRecord{prev, gap, static_cast<double>(gap) / (lp * lp)});
      }
    }
    prev = p;
  });
  return records;
}

inline uint64_t max_gap_from_sorted(const std::vector<uint64_t>& positions) {
  uint64_t best = 0;
  for (size_t i = 1; i < positions.size(); ++i)
    best = std::max(best, positions[i] - positions[i - 1]);
  return best;
}

struct RatioPoint {
  uint64_t y = 0;
  uint64_t M_y = 0;
  uint64_t M_2y = 0;
  double ratio = 0.0;
};

// M(x,2y)/M(x,y) for each y; both numerator and denominator from one pass.
inline std::vector<RatioPoint> ratio_statistic(uint64_t x,
                                               const std::vector<uint64_t>& ys) {
  std::vector<uint64_t> all;
  for (uint64_t y : ys) {
    all.push_back(y);
    all.push_back(2 * y);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto stats = window_extremes(x, all);
  auto M_of = [&](uint64_t y) -> uint64_t {
    for (const auto& s : stats)
      if (s.y == y) return s.M;
    throw std::logic_error("ratio_statistic: missing y");
  };
  std::vector<RatioPoint> out;
  for (uint64_t y : ys) {
    uint64_t My = M_of(y), M2y = M_of(2 * y);
    if (My == 0) throw std::domain_error("ratio_statistic: M(x,y)=0");
    out.push_back(RatioPoint{y, My, M2y, static_cast<double>(M2y) / static_cast<double>(My)});
  }
  return out;
}

// Reads a `p,gap` table ('#' comments and one optional header line allowed),
// recomputing the normalized ratio.  Rows must keep p strictly increasing.
inline std::vector<GapRecord> load_gap_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gap records: " + path);
  std::vector<GapRecord> out;
  std::string line;
  size_t lineno = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
      line.pop_back();
    size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start])))
      ++start;
    line.erase(0, start);
    if (line.empty()) continue;
    if (!saw_data && line.find_first_not_of("0123456789, \t") != std::string::npos) {
      saw_data = true;  // header line
      continue;
    }
    saw_data = true;
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw parse_error("gap records line " + std::to_string(lineno) +
                        ": expected two fields");
    uint64_t p, gap;
    try {
      p = std::stoull(line.substr(0, comma));
      gap = std::stoull(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw parse_error("gap records line " + std::to_string(lineno) + ": bad number");
    }
    if (p < 2 || gap < 1)
      throw parse_error("gap records line " + std::to_string(lineno) +
                        ": need p >= 2 and gap >= 1");
    if (!out.empty() && p <= out.back().p)
      throw parse_error("gap records line " + std::to_string(lineno) +
                        ": p must increase");
    double lp = std::log(static_cast<double>(p));
    out.push_back(GapRecord{p, gap, static_cast<double>(gap) / (lp * lp)});
  }
  return out;
}

}  // namespace primespan
