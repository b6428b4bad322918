#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "primespan/analytic.hpp"
#include "primespan/binomial.hpp"
#include "primespan/primes.hpp"
#include "primespan/rng.hpp"
#include "primespan/threading.hpp"
#include "primespan/wheel.hpp"
#include "primespan/windows.hpp"

namespace primespan {

// Windows are classified by the residue of X shifted back this many units.
// The classifying count then measures the coprime pattern the window's primes
// actually sit in; anchoring at lag 0 instead provably flattens the per-class
// means (every class sees the same mixture), which is selectable for contrast.
inline constexpr int64_t kClassAnchorLag = 2;

struct DistRow {
  uint64_t N = 0;
  uint64_t size = 0;
  double mean = 0.0;
  double variance = 0.0;  // population normalization
  double L_N = 0.0;       // N / mean
  double exp_mean = 0.0;  // N / L
  double exp_var = 0.0;   // (N/L)(1 - 1/L)
  bool flagged = false;   // thin row, kept but marked
};

struct TrendFit {
  double slope = 0.0;
  double intercept = 0.0;       // value at N = 0
  double center_full = 0.0;     // N where the fitted line meets L
  double center_printed = 0.0;  // same, from the 3-decimal intercept
  uint64_t rows_used = 0;
};

struct DistributionTable {
  uint64_t x = 0, y = 0;
  int z = 0;
  LogMode log_mode = LogMode::refined;
  int64_t anchor_lag = kClassAnchorLag;
  double L = 0.0;
  uint64_t N_min = 0, N_max = 0, h_max = 0;
  std::vector<DistRow> rows;  // attained N only, ascending
  std::vector<std::vector<uint64_t>> hist;  // [N - N_min][h], h in [0, h_max]
  TrendFit trend;

  uint64_t total() const {
    uint64_t s = 0;
    for (const auto& r : rows) s += r.size;
    return s;
  }

  const std::vector<uint64_t>& hist_row(uint64_t N) const {
    if (N < N_min || N > N_max) throw std::out_of_range("hist_row: N not attained");
    return hist[N - N_min];
  }

  double expected_count(uint64_t N, uint64_t h) const {
    for (const auto& r : rows)
      if (r.N == N)
        return h > N ? 0.0
                     : static_cast<double>(r.size) *
                           binom_pmf({static_cast<int64_t>(N), L}, static_cast<int64_t>(h));
    throw std::out_of_range("expected_count: N not attained");
  }
};

struct DistOptions {
  LogMode log_mode = LogMode::refined;
  int64_t anchor_lag = kClassAnchorLag;
  unsigned threads = 0;               // 0 = default_threads()
  uint64_t flag_threshold = 10000;    // absolute thin-row marker
  double trend_exclude_ratio = 1000;  // drop rows under max_size/this from the fit
};

namespace detail {

struct DistAccum {
  std::vector<uint64_t> cnt, sum_h, sum_h2;
  std::vector<uint64_t> hist;  // flat [N][h]
};

}  // namespace detail

// Classify every X in (x, 2x] by the wheel count at its anchored residue and
// histogram the true prime count of (X, X+y].  All accumulation is integral,
// so the result is independent of threading and block partition.
inline DistributionTable distribution_experiment(uint64_t x, uint64_t y, int z,
                                                 DistOptions opt = {}) {
  if (x < 100 || y < 1 || y >= x)
    throw std::domain_error("distribution_experiment: need x >= 100, 1 <= y < x");
  auto S = wheel_class_table(y, z);
  auto pr = primorial(z);
  uint64_t P = pr.P;
  uint16_t Nmin = S[0], Nmax = S[0];
  for (uint16_t v : S) { Nmin = std::min(Nmin, v); Nmax = std::max(Nmax, v); }

  DistributionTable out;
  out.x = x; out.y = y; out.z = z;
  out.log_mode = opt.log_mode;
  out.anchor_lag = opt.anchor_lag;
  double lx = std::log(static_cast<double>(x));
  out.L = pr.phi_ratio * (opt.log_mode == LogMode::raw ? lx : std::log(4.0) + lx - 1.0);
  out.N_min = Nmin; out.N_max = Nmax; out.h_max = Nmax;

  uint64_t nclasses = Nmax + 1;      // index by N directly during accumulation
  uint64_t hwidth = out.h_max + 1;
  detail::DistAccum total;
  total.cnt.assign(nclasses, 0);
  total.sum_h.assign(nclasses, 0);
  total.sum_h2.assign(nclasses, 0);
  total.hist.assign(nclasses * hwidth, 0);
  std::mutex merge_mu;

  auto base = small_primes_upto(static_cast<uint64_t>(std::sqrt(static_cast<double>(2 * x + y))) + 2);

  parallel_blocks(x + 1, 2 * x + 1, opt.threads ? opt.threads : default_threads(), uint64_t{1} << 22,
                  [&](uint64_t, uint64_t blo, uint64_t bhi) {
    // Prime flags for values in [blo + 1, bhi - 1 + y].
    uint64_t vlo = blo + 1, vhi = bhi - 1 + y;
    std::vector<char> flag(vhi - vlo + 1, 1);
    for (uint64_t p : base) {
      if (p * p > vhi) break;
      uint64_t first = std::max(p * p, (vlo + p - 1) / p * p);
      for (uint64_t m = first; m <= vhi; m += p) flag[m - vlo] = 0;
    }

    detail::DistAccum local;
    local.cnt.assign(nclasses, 0);
    local.sum_h.assign(nclasses, 0);
    local.sum_h2.assign(nclasses, 0);
    local.hist.assign(nclasses * hwidth, 0);

    uint64_t h = 0;
    for (uint64_t v = blo + 1; v <= blo + y; ++v) h += flag[v - vlo];
    int64_t lagged = static_cast<int64_t>(blo % P) - opt.anchor_lag;
    uint64_t m = static_cast<uint64_t>(((lagged % static_cast<int64_t>(P)) +
                                        static_cast<int64_t>(P)) % static_cast<int64_t>(P));
    for (uint64_t X = blo;;) {
      uint16_t N = S[m];
      local.cnt[N] += 1;
      local.sum_h[N] += h;
      local.sum_h2[N] += h * h;
      local.hist[N * hwidth + h] += 1;
      if (++X >= bhi) break;
      h += flag[X + y - vlo];
      h -= flag[X - vlo];
      if (++m == P) m = 0;
    }

    std::lock_guard<std::mutex> lk(merge_mu);
    for (uint64_t i = 0; i < nclasses; ++i) {
      total.cnt[i] += local.cnt[i];
      total.sum_h[i] += local.sum_h[i];
      total.sum_h2[i] += local.sum_h2[i];
    }
    for (uint64_t i = 0; i < total.hist.size(); ++i) total.hist[i] += local.hist[i];
  });

  uint64_t max_size = 0;
  for (uint64_t N = Nmin; N <= Nmax; ++N) max_size = std::max(max_size, total.cnt[N]);
  for (uint64_t N = Nmin; N <= Nmax; ++N) {
    out.hist.emplace_back(total.hist.begin() + static_cast<int64_t>(N * hwidth),
                          total.hist.begin() + static_cast<int64_t>((N + 1) * hwidth));
    if (total.cnt[N] == 0) continue;
    DistRow r;
    r.N = N;
    r.size = total.cnt[N];
    double sz = static_cast<double>(r.size);
    r.mean = static_cast<double>(total.sum_h[N]) / sz;
    r.variance = static_cast<double>(total.sum_h2[N]) / sz - r.mean * r.mean;
    r.L_N = r.mean > 0.0 ? static_cast<double>(N) / r.mean : 0.0;
    r.exp_mean = static_cast<double>(N) / out.L;
    r.exp_var = r.exp_mean * (1.0 - 1.0 / out.L);
    r.flagged = r.size < opt.flag_threshold;
    out.rows.push_back(r);
  }

  // Unweighted straight line through (N, L(N)) for the well-populated rows.
  double cut = static_cast<double>(max_size) / opt.trend_exclude_ratio;
  double sn = 0, sl = 0, snn = 0, snl = 0;
  uint64_t used = 0;
  for (const auto& r : out.rows) {
    if (static_cast<double>(r.size) < cut || r.mean <= 0.0) continue;
    double Nd = static_cast<double>(r.N);
    sn += Nd; sl += r.L_N; snn += Nd * Nd; snl += Nd * r.L_N;
    ++used;
  }
  if (used >= 2) {
    double du = static_cast<double>(used);
    double det = du * snn - sn * sn;
    out.trend.slope = (du * snl - sn * sl) / det;
    out.trend.intercept = (sl * snn - sn * snl) / det;
    out.trend.center_full = (out.L - out.trend.intercept) / out.trend.slope;
    double ip = std::round(out.trend.intercept * 1000.0) / 1000.0;
    out.trend.center_printed = (out.L - ip) / out.trend.slope;
    out.trend.rows_used = used;
  }
  return out;
}

enum class SimMode { cramer, modified };

struct ModelConfig {
  SimMode mode = SimMode::cramer;
  int z = 11;          // modified mode's wheel
  uint64_t x = 0;      // range is (x, 2x]
  uint64_t y = 0;      // window length
  uint64_t windows = 0;  // tiled-window mode when > 0
  uint64_t trials = 0;   // full-range trials when > 0
  uint64_t seed = 0;
  unsigned threads = 0;
};

struct SimWindowCount {
  uint64_t index = 0;
  uint64_t X = 0;
  uint64_t count = 0;
};

struct SimTrial {
  uint64_t trial = 0;
  uint64_t points = 0;
  PrimeWindowStats stats;
  GapRecord max_gap;  // p = 0 when fewer than two points
};

struct SimulationResult {
  ModelConfig config;
  double kappa = 1.0;  // coprime density scale; 1 in cramer mode
  std::vector<SimWindowCount> windows;
  std::vector<SimTrial> trials;

  uint64_t max_window_count() const {
    uint64_t m = 0;
    for (const auto& w : windows) m = std::max(m, w.count);
    return m;
  }
  uint64_t min_window_count() const {
    uint64_t m = UINT64_MAX;
    for (const auto& w : windows) m = std::min(m, w.count);
    return m;
  }
};

// Coin flips are keyed by (seed, stream, absolute position), so any thread
// partition reproduces the same sequences bit for bit.
inline SimulationResult simulate(const ModelConfig& cfg) {
  if (cfg.windows == 0 && cfg.trials == 0)
    throw std::domain_error("simulate: need at least one window or trial");
  if (cfg.windows > 0 && cfg.trials > 0)
    throw std::domain_error("simulate: windows and trials modes are exclusive");
  if (cfg.x < 10 || cfg.y < 1)
    throw std::domain_error("simulate: need x >= 10 and y >= 1");
  SimulationResult out;
  out.config = cfg;

  std::vector<uint32_t> wheel_primes;
  double kappa = 1.0;
  if (cfg.mode == SimMode::modified) {
    auto pr = primorial(cfg.z);
    kappa = pr.phi_ratio;
    wheel_primes = pr.primes;
    if (1.0 / (kappa * std::log(static_cast<double>(cfg.x))) > 1.0)
      throw std::domain_error("simulate: modified density exceeds 1 at this x");
  }
  out.kappa = kappa;

  CounterRng rng(cfg.seed);
  auto coprime = [&](uint64_t n) {
    for (uint32_t p : wheel_primes)
      if (n % p == 0) return false;
    return true;
  };
  auto hit = [&](uint64_t stream, uint64_t n) {
    if (cfg.mode == SimMode::modified && !coprime(n)) return false;
    double prob = 1.0 / (kappa * std::log(static_cast<double>(n)));
    return rng.unit(stream, n) < prob;
  };
  unsigned threads = cfg.threads ? cfg.threads : default_threads();

  if (cfg.windows > 0) {
    if (cfg.windows * cfg.y > cfg.x)
      throw std::domain_error("simulate: windows do not fit in (x, 2x]");
    out.windows.assign(cfg.windows, {});
    parallel_blocks(0, cfg.windows, threads, 16, [&](uint64_t, uint64_t wlo, uint64_t whi) {
      for (uint64_t w = wlo; w < whi; ++w) {
        uint64_t X = cfg.x + w * cfg.y;
        uint64_t c = 0;
        for (uint64_t n = X + 1; n <= X + cfg.y; ++n)
          if (hit(w, n)) ++c;
        out.windows[w] = {w, X, c};
      }
    });
    return out;
  }

  out.trials.assign(cfg.trials, {});
  parallel_blocks(0, cfg.trials, threads, 1, [&](uint64_t, uint64_t tlo, uint64_t thi) {
    for (uint64_t t = tlo; t < thi; ++t) {
      std::vector<uint64_t> pts;
      for (uint64_t n = cfg.x + 1; n <= 2 * cfg.x; ++n)
        if (hit(t, n)) pts.push_back(n);
      SimTrial st;
      st.trial = t;
      st.points = pts.size();
      st.stats = extremes_from_sorted(pts, cfg.x, {cfg.y}).at(0);
      if (pts.size() >= 2) {
        uint64_t best = 0, anchor = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
          if (pts[i] - pts[i - 1] > best) { best = pts[i] - pts[i - 1]; anchor = pts[i - 1]; }
        double lp = std::log(static_cast<double>(anchor));
        st.max_gap = {anchor, best, static_cast<double>(best) / (lp * lp)};
      }
      out.trials[t] = st;
    }
  });
  return out;
}

}  // namespace primespan
