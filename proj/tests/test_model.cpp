#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "primespan/analytic.hpp"
#include "primespan/model.hpp"
#include "primespan/rng.hpp"

using namespace primespan;

namespace {

struct RowOracle {
  uint64_t N;
  uint64_t size;
  double mean;
  double variance;
  double L_N;
};

// Captured from a direct population count at x = 1e6, y = 340, z = 11.
const RowOracle kAnchoredRows[] = {
    {68, 12118, 23.3404852286, 11.5465553678, 2.9133927309},
    {69, 98684, 23.5487819707, 11.6358088808, 2.9300878528},
    {70, 339398, 23.7981013441, 11.8454707939, 2.9414111230},
    {71, 354992, 24.0246315410, 12.0320137406, 2.9553002667},
    {72, 167096, 24.2699526021, 12.1664371261, 2.9666312572},
    {73, 27712, 24.5248267898, 12.1197646929, 2.9765755585},
};

const RowOracle kAlignedRows[] = {
    {68, 12118, 23.0940749299, 0, 0},
    {69, 98686, 23.4128853130, 0, 0},
    {70, 339398, 23.7359795874, 0, 0},
    {71, 354992, 24.0587675215, 0, 0},
    {72, 167096, 24.3857542969, 0, 0},
    {73, 27710, 24.7418982317, 0, 0},
};

}  // namespace

TEST_CASE("classified window distribution at one million") {
  auto table = distribution_experiment(1000000, 340, 11);

  SECTION("metadata") {
    REQUIRE(table.x == 1000000);
    REQUIRE(table.y == 340);
    REQUIRE(table.z == 11);
    REQUIRE(table.anchor_lag == kClassAnchorLag);
    REQUIRE(table.N_min == 68);
    REQUIRE(table.N_max == 73);
    REQUIRE(table.L == Catch::Approx(2.951024).margin(1e-5));
    REQUIRE(table.total() == 1000000);
    REQUIRE(table.rows.size() == 6);
  }

  SECTION("row statistics match the frozen census") {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      const auto& o = kAnchoredRows[i];
      REQUIRE(r.N == o.N);
      REQUIRE(r.size == o.size);
      REQUIRE(r.mean == Catch::Approx(o.mean).margin(5e-9));
      REQUIRE(r.variance == Catch::Approx(o.variance).margin(5e-9));
      REQUIRE(r.L_N == Catch::Approx(o.L_N).margin(5e-9));
      REQUIRE_FALSE(r.flagged);
      REQUIRE(r.exp_mean == Catch::Approx(static_cast<double>(r.N) / table.L).margin(1e-12));
      REQUIRE(r.exp_var ==
              Catch::Approx(r.exp_mean * (1.0 - 1.0 / table.L)).margin(1e-12));
    }
  }

  SECTION("histograms carry the full mass") {
    for (const auto& r : table.rows) {
      const auto& h = table.hist_row(r.N);
      REQUIRE(h.size() == table.h_max + 1);
      uint64_t mass = 0, sum = 0;
      for (uint64_t k = 0; k < h.size(); ++k) {
        mass += h[k];
        sum += k * h[k];
      }
      REQUIRE(mass == r.size);
      REQUIRE(static_cast<double>(sum) / static_cast<double>(mass) ==
              Catch::Approx(r.mean).margin(1e-12));
      double model_mass = 0.0;
      for (uint64_t k = 0; k <= table.h_max; ++k)
        model_mass += table.expected_count(r.N, k);
      REQUIRE(model_mass == Catch::Approx(static_cast<double>(r.size)).margin(1.0));
    }
    REQUIRE_THROWS_AS(table.hist_row(67), std::out_of_range);
    REQUIRE_THROWS_AS(table.expected_count(74, 0), std::out_of_range);
  }

  SECTION("moments sit near the refined prediction") {
    auto pred = ms_variance(1e6, 340.0, LogMode::refined);
    double wsum = 0.0, wmean = 0.0;
    for (const auto& r : table.rows) {
      wsum += static_cast<double>(r.size);
      wmean += static_cast<double>(r.size) * r.mean;
      REQUIRE(r.variance == Catch::Approx(pred.variance).margin(0.5));
    }
    REQUIRE(wmean / wsum == Catch::Approx(pred.mean).margin(0.05));
  }

  SECTION("trend line crosses L inside the populated band") {
    REQUIRE(table.trend.rows_used == 6);
    REQUIRE(table.trend.slope > 0.0);
    REQUIRE(table.trend.center_full == Catch::Approx(70.80).margin(0.05));
    REQUIRE(table.trend.center_printed == Catch::Approx(table.trend.center_full).margin(0.05));
  }
}

TEST_CASE("anchor lag moves class boundaries but not the census totals") {
  DistOptions aligned;
  aligned.anchor_lag = 0;
  auto table = distribution_experiment(1000000, 340, 11, aligned);
  REQUIRE(table.anchor_lag == 0);
  REQUIRE(table.total() == 1000000);
  REQUIRE(table.rows.size() == 6);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const auto& o = kAlignedRows[i];
    REQUIRE(r.N == o.N);
    REQUIRE(r.size == o.size);
    REQUIRE(r.mean == Catch::Approx(o.mean).margin(5e-9));
  }
  // the aligned means spread wider around the same overall average
  REQUIRE(table.rows.front().mean < kAnchoredRows[0].mean);
  REQUIRE(table.rows.back().mean > kAnchoredRows[5].mean);
}

TEST_CASE("log mode changes only the model columns") {
  DistOptions raw;
  raw.log_mode = LogMode::raw;
  auto a = distribution_experiment(100000, 150, 7);
  auto b = distribution_experiment(100000, 150, 7, raw);
  REQUIRE(b.L < a.L);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].size == b.rows[i].size);
    REQUIRE(a.rows[i].mean == b.rows[i].mean);
    REQUIRE(a.rows[i].exp_mean != b.rows[i].exp_mean);
  }
}

TEST_CASE("distribution census is independent of thread count") {
  DistOptions one, three;
  one.threads = 1;
  three.threads = 3;
  auto a = distribution_experiment(200000, 120, 11, one);
  auto b = distribution_experiment(200000, 120, 11, three);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(a.rows[i].size == b.rows[i].size);
    REQUIRE(a.rows[i].mean == b.rows[i].mean);          // bitwise: integer sums
    REQUIRE(a.rows[i].variance == b.rows[i].variance);
  }
  REQUIRE(a.hist == b.hist);
  REQUIRE(a.trend.slope == b.trend.slope);
}

TEST_CASE("distribution guards") {
  REQUIRE_THROWS_AS(distribution_experiment(50, 10, 11), std::domain_error);
  REQUIRE_THROWS_AS(distribution_experiment(1000, 0, 11), std::domain_error);
  REQUIRE_THROWS_AS(distribution_experiment(1000, 1000, 11), std::domain_error);
}

TEST_CASE("window simulation reproduces its own coin flips") {
  ModelConfig cfg;
  cfg.mode = SimMode::cramer;
  cfg.x = 1000000;
  cfg.y = 191;
  cfg.windows = 1000;
  cfg.seed = 14;
  auto res = simulate(cfg);

  REQUIRE(res.kappa == 1.0);
  REQUIRE(res.windows.size() == 1000);
  REQUIRE(res.trials.empty());

  SECTION("every count replays from the keyed generator") {
    CounterRng rng(cfg.seed);
    for (const auto& w : res.windows) {
      REQUIRE(w.X == cfg.x + w.index * cfg.y);
      uint64_t c = 0;
      for (uint64_t n = w.X + 1; n <= w.X + cfg.y; ++n)
        if (rng.unit(w.index, n) < 1.0 / std::log(static_cast<double>(n))) ++c;
      REQUIRE(c == w.count);
    }
  }

  SECTION("the largest count lands in the predicted band") {
    double kp = k_plus(191, std::log(1e6), 1000.0);
    REQUIRE(kp == Catch::Approx(29.794).margin(0.01));
    REQUIRE(res.max_window_count() == 29);
    REQUIRE(static_cast<double>(res.max_window_count()) >= kp - 2.0);
    REQUIRE(static_cast<double>(res.max_window_count()) <= kp + 2.0);
    REQUIRE(res.min_window_count() < res.max_window_count());
  }

  SECTION("thread partition cannot change the stream") {
    ModelConfig c1 = cfg, c3 = cfg;
    c1.threads = 1;
    c3.threads = 3;
    auto r1 = simulate(c1), r3 = simulate(c3);
    REQUIRE(r1.windows.size() == r3.windows.size());
    for (std::size_t i = 0; i < r1.windows.size(); ++i) {
      REQUIRE(r1.windows[i].count == r3.windows[i].count);
      REQUIRE(r1.windows[i].X == r3.windows[i].X);
    }
  }
}

TEST_CASE("coprime-filtered simulation") {
  ModelConfig cfg;
  cfg.mode = SimMode::modified;
  cfg.z = 11;
  cfg.x = 1000;
  cfg.y = 40;
  cfg.windows = 5;
  cfg.seed = 7;
  auto res = simulate(cfg);
  REQUIRE(res.kappa == 480.0 / 2310.0);

  CounterRng rng(cfg.seed);
  const uint32_t wheel[] = {2, 3, 5, 7, 11};
  for (const auto& w : res.windows) {
    uint64_t c = 0;
    for (uint64_t n = w.X + 1; n <= w.X + cfg.y; ++n) {
      bool coprime = true;
      for (uint32_t p : wheel)
        if (n % p == 0) { coprime = false; break; }
      if (coprime &&
          rng.unit(w.index, n) < 1.0 / (res.kappa * std::log(static_cast<double>(n))))
        ++c;
    }
    REQUIRE(c == w.count);
  }

  // survivor density would exceed 1 near the wheel's own scale
  ModelConfig tiny = cfg;
  tiny.x = 50;
  REQUIRE_THROWS_AS(simulate(tiny), std::domain_error);
}

TEST_CASE("full-range trials") {
  ModelConfig cfg;
  cfg.x = 2000;
  cfg.y = 60;
  cfg.trials = 8;
  cfg.seed = 3;
  auto res = simulate(cfg);
  REQUIRE(res.trials.size() == 8);
  REQUIRE(res.windows.empty());

  CounterRng rng(cfg.seed);
  for (const auto& t : res.trials) {
    std::vector<uint64_t> pts;
    for (uint64_t n = cfg.x + 1; n <= 2 * cfg.x; ++n)
      if (rng.unit(t.trial, n) < 1.0 / std::log(static_cast<double>(n))) pts.push_back(n);
    REQUIRE(t.points == pts.size());
    auto st = extremes_from_sorted(pts, cfg.x, {cfg.y}).at(0);
    REQUIRE(t.stats.M == st.M);
    REQUIRE(t.stats.m == st.m);
    REQUIRE(t.stats.argmax_X == st.argmax_X);
    REQUIRE(t.stats.argmin_X == st.argmin_X);
    if (pts.size() >= 2) {
      uint64_t best = 0, anchor = 0;
      for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i] - pts[i - 1] > best) { best = pts[i] - pts[i - 1]; anchor = pts[i - 1]; }
      REQUIRE(t.max_gap.p == anchor);
      REQUIRE(t.max_gap.gap == best);
      double lp = std::log(static_cast<double>(anchor));
      REQUIRE(t.max_gap.ratio == Catch::Approx(best / (lp * lp)).margin(1e-12));
    } else {
      REQUIRE(t.max_gap.p == 0);
    }
  }

  ModelConfig c2 = cfg;
  c2.threads = 2;
  auto r2 = simulate(c2);
  for (std::size_t i = 0; i < res.trials.size(); ++i) {
    REQUIRE(res.trials[i].points == r2.trials[i].points);
    REQUIRE(res.trials[i].stats.M == r2.trials[i].stats.M);
    REQUIRE(res.trials[i].max_gap.gap == r2.trials[i].max_gap.gap);
  }
}

TEST_CASE("simulation guards") {
  ModelConfig cfg;
  cfg.x = 1000;
  cfg.y = 10;
  REQUIRE_THROWS_AS(simulate(cfg), std::domain_error);  // no runs requested
  cfg.windows = 2;
  cfg.trials = 2;
  REQUIRE_THROWS_AS(simulate(cfg), std::domain_error);  // exclusive modes
  cfg.trials = 0;
  cfg.x = 5;
  REQUIRE_THROWS_AS(simulate(cfg), std::domain_error);  // x too small
  cfg.x = 100;
  cfg.y = 30;
  cfg.windows = 4;
  REQUIRE_THROWS_AS(simulate(cfg), std::domain_error);  // windows spill past 2x
}
