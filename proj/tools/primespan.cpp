#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "primespan/admissible.hpp"
#include "primespan/analytic.hpp"
#include "primespan/csv.hpp"
#include "primespan/errors.hpp"
#include "primespan/manifest.hpp"
#include "primespan/model.hpp"
#include "primespan/primes.hpp"
#include "primespan/special.hpp"
#include "primespan/svg.hpp"
#include "primespan/threading.hpp"
#include "primespan/wheel.hpp"
#include "primespan/windows.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* kUsage = R"(usage: primespan <subcommand> [flags]

subcommands
  scan      window extremes M/m over a y range        --x --y-min --y-max [--step] [--grid] [--s-table]
  gaps      maximal prime gap records and curves      --limit [--file] [--fit-a a1,a2,..]
  wheel     primorial window histogram / fixed point  --z with --y | --logx [--y0] [--plain-L]
  dist      classified short-interval distribution    --x --y --z [--aligned]
  tuples    admissible pattern bounds / tuple check   --y [--s-table] | --file [--cutoff]
  simulate  random models over (x, 2x]                --x --y --windows N | --trials N [--mode] [--z]
  predict   analytic prediction curves                --x --y-min --y-max [--step] [--grid]
  ratio     window doubling statistic M(x,2y)/M(x,y)  --x with --y | --grid

common flags
  --out DIR --svg --threads N --seed S --log-mode raw|refined
  --c-plus V --c-minus V --i-have-time
)";

struct Args {
  std::string sub;
  std::map<std::string, std::string> kv;
  std::set<std::string> on;  // boolean flags
};

const std::set<std::string> kBoolFlags = {"svg", "aligned", "i-have-time", "grid",
                                          "plain-L"};

const std::map<std::string, std::set<std::string>> kSubFlags = {
    {"scan", {"x", "y-min", "y-max", "step", "grid", "s-table"}},
    {"gaps", {"limit", "file", "fit-a"}},
    {"wheel", {"z", "y", "logx", "y0", "plain-L"}},
    {"dist", {"x", "y", "z", "aligned"}},
    {"tuples", {"y", "file", "s-table", "cutoff"}},
    {"simulate", {"x", "y", "windows", "trials", "mode", "z"}},
    {"predict", {"x", "y-min", "y-max", "step", "grid"}},
    {"ratio", {"x", "y", "grid"}},
};

const std::set<std::string> kCommonFlags = {"out",    "svg",    "threads",
                                            "seed",   "log-mode", "c-plus",
                                            "c-minus", "i-have-time"};

Args parse_args(int argc, char** argv) {
  Args a;
  if (argc < 2) throw usage_error("missing subcommand");
  a.sub = argv[1];
  auto sub_it = kSubFlags.find(a.sub);
  if (sub_it == kSubFlags.end()) throw usage_error("unknown subcommand: " + a.sub);
  for (int i = 2; i < argc; ++i) {
    std::string tok = argv[i];
    if (tok.rfind("--", 0) != 0) throw usage_error("unexpected argument: " + tok);
    std::string name = tok.substr(2);
    if (!kCommonFlags.count(name) && !sub_it->second.count(name))
      throw usage_error("unknown flag for " + a.sub + ": " + tok);
    if (kBoolFlags.count(name)) {
      a.on.insert(name);
      continue;
    }
    if (i + 1 >= argc) throw usage_error("flag needs a value: " + tok);
    if (!a.kv.emplace(name, argv[++i]).second)
      throw usage_error("flag repeated: " + tok);
  }
  return a;
}

std::string need(const Args& a, const std::string& name) {
  auto it = a.kv.find(name);
  if (it == a.kv.end()) throw usage_error("missing required flag --" + name);
  return it->second;
}

std::optional<std::string> get(const Args& a, const std::string& name) {
  auto it = a.kv.find(name);
  if (it == a.kv.end()) return std::nullopt;
  return it->second;
}

double to_double(const std::string& name, const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw usage_error("--" + name + ": not a number: " + s);
  return v;
}

// Accepts plain and scientific forms (340, 3e7) for counting arguments.
uint64_t to_u64(const std::string& name, const std::string& s) {
  double v = to_double(name, s);
  if (v < 0 || v > 1.8e19 || std::floor(v) != v)
    throw usage_error("--" + name + ": not a nonnegative integer: " + s);
  return static_cast<uint64_t>(v);
}

std::vector<double> to_double_list(const std::string& name, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(to_double(name, item));
  if (out.empty()) throw usage_error("--" + name + ": empty list");
  return out;
}

void check_budget(bool within, const std::string& what, const Args& a) {
  if (!within && !a.on.count("i-have-time"))
    throw primespan::budget_error(what + " (pass --i-have-time to override)");
}

struct Run {
  primespan::RunManifest manifest;
  std::filesystem::path dir;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Run(const Args& a) {
    manifest.subcommand = a.sub;
    manifest.version = kVersion;
    dir = a.kv.count("out") ? a.kv.at("out") : ".";
    std::filesystem::create_directories(dir);
    for (const auto& [k, v] : a.kv)
      if (k != "out") manifest.parameters[k] = v;
    for (const auto& f : a.on) manifest.parameters[f] = "1";
    if (auto s = get(a, "seed")) manifest.seed = to_u64("seed", *s);
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  void note(const std::string& key, const std::string& value) {
    manifest.parameters[key] = value;
  }

  void finish() {
    auto dt = std::chrono::steady_clock::now() - t0;
    manifest.wall_seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(dt).count();
    manifest.write(path("run.json"));
  }
};

unsigned threads_of(const Args& a) {
  if (auto t = get(a, "threads")) {
    uint64_t n = to_u64("threads", *t);
    if (n < 1 || n > 256) throw usage_error("--threads: need 1..256");
    return static_cast<unsigned>(n);
  }
  return primespan::default_threads();
}

primespan::LogMode log_mode_of(const Args& a) {
  auto m = get(a, "log-mode").value_or("refined");
  if (m == "raw") return primespan::LogMode::raw;
  if (m == "refined") return primespan::LogMode::refined;
  throw usage_error("--log-mode: raw or refined");
}

double c_plus_of(const Args& a) {
  if (auto v = get(a, "c-plus")) return to_double("c-plus", *v);
  return primespan::c_plus_default();
}

double c_minus_of(const Args& a) {
  if (auto v = get(a, "c-minus")) return to_double("c-minus", *v);
  return primespan::c_minus_default();
}

// y grid shared by scan and predict: explicit [y-min, y-max] by step, or the
// t in [1/3, 2] sweep of (log x)^2 in steps of 1/30.
std::vector<uint64_t> y_grid(const Args& a, double logx) {
  std::vector<uint64_t> ys;
  if (a.on.count("grid")) {
    double lx2 = logx * logx;
    for (int i = 10; i <= 60; ++i) {
      uint64_t y = static_cast<uint64_t>(std::llround(lx2 * i / 30.0));
      if (y >= 1 && (ys.empty() || y != ys.back())) ys.push_back(y);
    }
    return ys;
  }
  uint64_t lo = to_u64("y-min", need(a, "y-min"));
  uint64_t hi = to_u64("y-max", need(a, "y-max"));
  uint64_t step = a.kv.count("step") ? to_u64("step", a.kv.at("step")) : 1;
  if (step == 0) throw std::invalid_argument("step must be positive");
  if (lo < 1 || hi < lo) throw usage_error("need 1 <= y-min <= y-max");
  for (uint64_t y = lo; y <= hi; y += step) ys.push_back(y);
  return ys;
}

using primespan::Cell;

Cell num(double v) { return v; }
Cell blank() { return std::string(); }

// ---------------------------------------------------------------- scan

int cmd_scan(const Args& a) {
  uint64_t x = to_u64("x", need(a, "x"));
  if (x < 100) throw usage_error("scan: need x >= 100");
  check_budget(x <= 1000000000ull, "scan: x above 1e9", a);
  double lx = std::log(static_cast<double>(x));
  auto ys = y_grid(a, lx);
  double cp = c_plus_of(a), cm = c_minus_of(a);
  auto mode = log_mode_of(a);

  std::map<int64_t, primespan::SBounds> table;
  if (auto p = get(a, "s-table")) table = primespan::load_S_table(*p);

  Run run(a);
  run.note("threads", std::to_string(threads_of(a)));
  run.note("c_plus_used", primespan::format_sig(cp));
  run.note("c_minus_used", primespan::format_sig(cm));

  auto stats = primespan::window_extremes(x, ys);

  uint64_t missing = 0;
  primespan::CsvWriter csv(run.path("scan.csv"),
                           {"y", "M", "m", "S_y_bound", "L_pred", "u_plus_pred",
                            "u_minus_pred", "y_over_logx"});
  std::vector<std::pair<double, double>> mpts, mcurve;
  for (const auto& s : stats) {
    Cell sb = blank();
    try {
      sb = static_cast<uint64_t>(
          primespan::lookup_S(static_cast<int64_t>(s.y), table).upper);
    } catch (const std::out_of_range&) {
      ++missing;
    }
    Cell lp = blank();
    try {
      double v = mode == primespan::LogMode::refined
                     ? primespan::L_pred_refined(static_cast<double>(x),
                                                 static_cast<double>(s.y))
                     : primespan::L_pred(static_cast<double>(x),
                                         static_cast<double>(s.y));
      lp = v;
    } catch (const std::domain_error&) {
    }
    auto pred = primespan::make_sieve_prediction(x, s.y, cp, cm);
    csv.row({s.y, s.M, s.m, sb, lp, num(pred.M_pred), num(pred.m_pred),
             num(static_cast<double>(s.y) / lx)});
    mpts.push_back({static_cast<double>(s.y), static_cast<double>(s.M)});
    mcurve.push_back({static_cast<double>(s.y), pred.M_pred});
  }
  csv.close();
  run.manifest.add_output("scan.csv", run.path("scan.csv"));
  if (missing)
    std::fprintf(stderr,
                 "warning: no S(y) bound for %" PRIu64
                 " rows; column left empty\n",
                 missing);

  if (a.on.count("svg")) {
    primespan::SvgPlot plot;
    plot.add_points(mpts);
    plot.add_curve(mcurve);
    double top = 1.0;
    for (const auto& p : mpts) top = std::max(top, p.second);
    plot.add_curve({{lx, 0.0}, {lx, top}}, "#666666", 1.0, true);
    plot.write(run.path("scan.svg"));
    run.manifest.add_output("scan.svg", run.path("scan.svg"));
  }
  run.finish();
  std::printf("scan: %zu rows at x=%" PRIu64 " -> %s\n", stats.size(), x,
              run.path("scan.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- gaps

int cmd_gaps(const Args& a) {
  uint64_t limit = to_u64("limit", need(a, "limit"));
  if (limit < 3) throw usage_error("gaps: need limit >= 3");
  check_budget(limit <= 4000000000ull, "gaps: limit above 4e9", a);
  double cm = c_minus_of(a);

  Run run(a);
  auto records = primespan::max_gap_records(limit);
  uint64_t sieved = records.size(), skipped = 0;
  if (auto f = get(a, "file")) {
    auto extra = primespan::load_gap_records(*f);
    for (const auto& r : extra) {
      if (r.p > limit && (records.empty() || r.gap > records.back().gap))
        records.push_back(r);
      else
        ++skipped;
    }
  }
  if (skipped)
    std::fprintf(stderr,
                 "warning: %" PRIu64
                 " ingested rows inside the sieved range were dropped\n",
                 skipped);

  {
    primespan::CsvWriter csv(run.path("gaps.csv"), {"p", "gap", "ratio"});
    for (const auto& r : records) csv.row({r.p, r.gap, r.ratio});
  }
  run.manifest.add_output("gaps.csv", run.path("gaps.csv"));
  run.note("sieved_records", std::to_string(sieved));

  std::vector<double> fit_as;
  if (auto f = get(a, "fit-a")) fit_as = to_double_list("fit-a", *f);
  std::vector<primespan::GapCurveFit> fits;
  if (!fit_as.empty()) {
    std::vector<primespan::GapRecord> fitable;
    for (const auto& r : records)
      if (static_cast<double>(r.p) > 15.16) fitable.push_back(r);
    primespan::CsvWriter csv(run.path("gap_fit.csv"), {"a", "b", "c", "rss"});
    for (double av : fit_as) {
      auto fit = primespan::best_fit_gap_curve(fitable, av);
      fits.push_back(fit);
      csv.row({num(fit.a), num(fit.b), num(fit.c), num(fit.rss)});
    }
    csv.close();
    run.manifest.add_output("gap_fit.csv", run.path("gap_fit.csv"));
  }

  // reference curves on a log grid up to the last record
  double top_logp = std::log(static_cast<double>(records.back().p));
  {
    std::vector<std::string> header = {"logp", "cramer", "granville", "halfloglog",
                                       "cadwell"};
    for (std::size_t i = 0; i < fits.size(); ++i)
      header.push_back("fit" + std::to_string(i + 1));
    primespan::CsvWriter csv(run.path("gap_curves.csv"), header);
    for (int i = 0; i <= 120; ++i) {
      double logp = 3.0 + (top_logp - 3.0) * i / 120.0;
      double p = std::exp(logp);
      std::vector<Cell> row = {
          num(logp),
          num(primespan::predicted_max_gap(p, primespan::GapModel::cramer)),
          num(primespan::predicted_max_gap(p, primespan::GapModel::granville, {}, cm)),
          num(primespan::predicted_max_gap(p, primespan::GapModel::halfloglog)),
          num(primespan::predicted_max_gap(p, primespan::GapModel::cadwell))};
      for (const auto& fit : fits)
        row.push_back(num(primespan::predicted_max_gap(
            p, primespan::GapModel::bestfit, {fit.a, fit.b, fit.c})));
      csv.row(row);
    }
  }
  run.manifest.add_output("gap_curves.csv", run.path("gap_curves.csv"));

  if (a.on.count("svg")) {
    primespan::SvgPlot plot;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records)
      pts.push_back({std::log(static_cast<double>(r.p)), static_cast<double>(r.gap)});
    plot.add_points(pts);
    const primespan::GapModel models[] = {
        primespan::GapModel::cramer, primespan::GapModel::granville,
        primespan::GapModel::halfloglog, primespan::GapModel::cadwell};
    const char* colors[] = {"#b03a2e", "#1e8449", "#b7950b", "#6c3483"};
    for (int mi = 0; mi < 4; ++mi) {
      std::vector<std::pair<double, double>> curve;
      for (int i = 0; i <= 120; ++i) {
        double logp = 3.0 + (top_logp - 3.0) * i / 120.0;
        curve.push_back(
            {logp, primespan::predicted_max_gap(std::exp(logp), models[mi], {}, cm)});
      }
      plot.add_curve(curve, colors[mi]);
    }
    plot.write(run.path("gaps.svg"));
    run.manifest.add_output("gaps.svg", run.path("gaps.svg"));
  }
  run.finish();
  std::printf("gaps: %zu records up to %" PRIu64 " -> %s\n", records.size(), limit,
              run.path("gaps.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- wheel

void write_histogram(const primespan::ResidueHistogram& h, const std::string& path) {
  primespan::CsvWriter csv(path, {"N", "C", "c_N"});
  for (const auto& [N, C] : h.counts) csv.row({N, C, num(h.c_value(N))});
}

int cmd_wheel(const Args& a) {
  uint64_t z = to_u64("z", need(a, "z"));
  if (z < 2 || z > 29) throw usage_error("wheel: need 2 <= z <= 29");
  bool histogram_mode = a.kv.count("y") > 0;
  bool fixed_mode = a.kv.count("logx") > 0;
  if (histogram_mode == fixed_mode)
    throw usage_error("wheel: exactly one of --y or --logx");
  if (fixed_mode && z > 23)
    throw usage_error("wheel: the fixed point supports z <= 23; histogram mode streams to 29");
  check_budget(z <= 23, "wheel: z above 23", a);

  Run run(a);
  if (histogram_mode) {
    uint64_t y = to_u64("y", a.kv.at("y"));
    bool streaming = z > 23;
    auto h = primespan::residue_window_counts(y, static_cast<int>(z), streaming);
    if (streaming) run.note("streaming", "1");
    write_histogram(h, run.path("histogram.csv"));
    run.manifest.add_output("histogram.csv", run.path("histogram.csv"));
    if (a.on.count("svg")) {
      primespan::SvgPlot plot;
      std::vector<std::pair<double, double>> pts;
      for (const auto& [N, C] : h.counts)
        pts.push_back({static_cast<double>(N), static_cast<double>(C)});
      plot.add_points(pts);
      plot.write(run.path("wheel.svg"));
      run.manifest.add_output("wheel.svg", run.path("wheel.svg"));
    }
    run.finish();
    std::printf("wheel: y=%" PRIu64 " z=%" PRIu64 ": %zu classes, P=%" PRIu64
                " phi=%" PRIu64 " -> %s\n",
                y, z, h.counts.size(), h.P, h.phi, run.path("histogram.csv").c_str());
    return 0;
  }

  double logx = to_double("logx", a.kv.at("logx"));
  if (!(logx > 1.0)) throw usage_error("wheel: need logx > 1");
  uint64_t y0 = a.kv.count("y0") ? to_u64("y0", a.kv.at("y0"))
                                 : static_cast<uint64_t>(std::llround(logx * logx));
  bool refine = !a.on.count("plain-L");
  auto fp = primespan::gap_prediction_fixed_point(logx, static_cast<int>(z), y0, refine);

  {
    primespan::CsvWriter csv(run.path("fixed_point.csv"),
                             {"iter", "y", "argmax_n", "prediction"});
    for (const auto& t : fp.trace)
      csv.row({static_cast<int64_t>(t.iter), t.y, t.argmax_n, num(t.prediction)});
  }
  run.manifest.add_output("fixed_point.csv", run.path("fixed_point.csv"));

  auto h = primespan::residue_window_counts(fp.y_star, static_cast<int>(z));
  write_histogram(h, run.path("histogram.csv"));
  run.manifest.add_output("histogram.csv", run.path("histogram.csv"));

  {
    primespan::CsvWriter csv(run.path("prediction_table.csv"),
                             {"n", "R", "prediction", "prediction_full"});
    for (const auto& r : fp.table)
      csv.row({r.n, r.R, num(r.prediction), num(r.prediction_full)});
  }
  run.manifest.add_output("prediction_table.csv", run.path("prediction_table.csv"));

  run.note("y_star", std::to_string(fp.y_star));
  run.note("converged", fp.converged ? "1" : "0");
  run.note("L", primespan::format_sig(fp.L));
  run.note("L_prime", primespan::format_sig(fp.L_prime));
  run.note("A_full", primespan::format_sig(fp.A_full));
  run.note("B_full", primespan::format_sig(fp.B_full));
  run.finish();
  std::printf("wheel: fixed point y*=%" PRIu64 " (%s), (P/phi)L'=%s log(x/P)=%s -> %s\n",
              fp.y_star, fp.converged ? "converged" : "not converged",
              primespan::format_sig(fp.A_full).c_str(),
              primespan::format_sig(fp.B_full).c_str(),
              run.path("prediction_table.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- dist

int cmd_dist(const Args& a) {
  uint64_t x = to_u64("x", need(a, "x"));
  uint64_t y = to_u64("y", need(a, "y"));
  uint64_t z = to_u64("z", need(a, "z"));
  check_budget(x <= 1000000000ull, "dist: x above 1e9", a);

  primespan::DistOptions opt;
  opt.log_mode = log_mode_of(a);
  opt.anchor_lag = a.on.count("aligned") ? 0 : primespan::kClassAnchorLag;
  opt.threads = threads_of(a);

  Run run(a);
  auto table = primespan::distribution_experiment(x, y, static_cast<int>(z), opt);

  {
    primespan::CsvWriter csv(run.path("dist.csv"),
                             {"N", "size", "mean", "variance", "L_N", "exp_mean",
                              "exp_var"});
    for (const auto& r : table.rows)
      csv.row({r.N, r.size, num(r.mean), num(r.variance), num(r.L_N),
               num(r.exp_mean), num(r.exp_var)});
  }
  run.manifest.add_output("dist.csv", run.path("dist.csv"));

  {
    primespan::CsvWriter csv(run.path("dist_hist.csv"), {"N", "h", "count", "expected"});
    for (const auto& r : table.rows) {
      const auto& hist = table.hist_row(r.N);
      for (uint64_t h = 0; h < hist.size(); ++h)
        csv.row({r.N, h, hist[h], num(table.expected_count(r.N, h))});
    }
  }
  run.manifest.add_output("dist_hist.csv", run.path("dist_hist.csv"));

  std::string flagged;
  for (const auto& r : table.rows)
    if (r.flagged) flagged += (flagged.empty() ? "" : " ") + std::to_string(r.N);
  run.note("L", primespan::format_sig(table.L));
  run.note("trend_slope", primespan::format_sig(table.trend.slope));
  run.note("trend_intercept", primespan::format_sig(table.trend.intercept));
  run.note("trend_center", primespan::format_sig(table.trend.center_printed));
  run.note("flagged_N", flagged);

  if (a.on.count("svg")) {
    primespan::SvgPlot plot;
    std::vector<std::pair<double, double>> pts, line;
    for (const auto& r : table.rows)
      pts.push_back({static_cast<double>(r.N), r.L_N});
    if (table.trend.rows_used >= 2) {
      double n0 = pts.front().first, n1 = pts.back().first;
      line = {{n0, table.trend.intercept + table.trend.slope * n0},
              {n1, table.trend.intercept + table.trend.slope * n1}};
      plot.add_curve(line);
    }
    plot.add_points(pts);
    plot.add_hline(table.L);
    plot.write(run.path("dist.svg"));
    run.manifest.add_output("dist.svg", run.path("dist.svg"));
  }
  run.finish();
  std::printf("dist: x=%" PRIu64 " y=%" PRIu64 " z=%" PRIu64
              ": L=%s slope=%s center=%s -> %s\n",
              x, y, z, primespan::format_sig(table.L).c_str(),
              primespan::format_sig(table.trend.slope).c_str(),
              primespan::format_sig(table.trend.center_printed).c_str(),
              run.path("dist.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- tuples

std::vector<int64_t> read_offsets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw primespan::parse_error("tuples: cannot open " + path);
  std::vector<int64_t> offsets;
  std::string line;
  while (std::getline(in, line)) {
    std::string body = line.substr(0, line.find('#'));
    std::istringstream ss(body);
    int64_t v;
    while (ss >> v) offsets.push_back(v);
    if (!ss.eof()) throw primespan::parse_error("tuples: non-integer in " + path);
  }
  return offsets;
}

int cmd_tuples(const Args& a) {
  bool has_y = a.kv.count("y") > 0, has_file = a.kv.count("file") > 0;
  if (has_y == has_file) throw usage_error("tuples: exactly one of --y or --file");
  Run run(a);

  if (has_file) {
    auto offsets = read_offsets(a.kv.at("file"));
    uint64_t cutoff = a.kv.count("cutoff") ? to_u64("cutoff", a.kv.at("cutoff"))
                                           : 1000000;
    auto s = primespan::singular_series(offsets, cutoff);
    auto chk = primespan::is_admissible(offsets);
    {
      primespan::CsvWriter csv(run.path("check.csv"),
                               {"k", "admissible", "blocking_prime",
                                "singular_series", "tail_bound"});
      csv.row({static_cast<uint64_t>(offsets.size()),
               static_cast<uint64_t>(chk.admissible ? 1 : 0),
               chk.admissible ? blank() : Cell(chk.blocking_prime), num(s.value),
               num(s.tail_bound)});
    }
    run.manifest.add_output("check.csv", run.path("check.csv"));
    run.finish();
    std::printf("tuples: k=%zu %s singular_series=%s -> %s\n", offsets.size(),
                chk.admissible ? "admissible" : "inadmissible",
                primespan::format_sig(s.value).c_str(),
                run.path("check.csv").c_str());
    return 0;
  }

  int64_t y = static_cast<int64_t>(to_u64("y", a.kv.at("y")));
  std::map<int64_t, primespan::SBounds> table;
  if (auto p = get(a, "s-table")) table = primespan::load_S_table(*p);

  primespan::SBounds b;
  std::string source;
  std::vector<int64_t> witness;
  try {
    b = primespan::lookup_S(y, table);
    source = y <= 24 ? "exact" : "table";
    if (source == "exact") witness = primespan::exact_S(y, 24).witness.offsets;
  } catch (const std::out_of_range&) {
    auto g1 = primespan::greedy_S_lower(y, primespan::GreedyStrategy::primes_in_y_2y);
    auto g2 = primespan::greedy_S_lower(y, primespan::GreedyStrategy::schinzel_sieve);
    const auto& best = g1.offsets.size() >= g2.offsets.size() ? g1 : g2;
    b.lower = static_cast<int64_t>(best.offsets.size());
    b.upper = 0;  // unknown
    source = "greedy";
    witness = best.offsets;
    std::fprintf(stderr,
                 "warning: no table row for y=%" PRId64 "; greedy lower bound only\n",
                 y);
  }

  {
    primespan::CsvWriter csv(run.path("tuples.csv"), {"y", "lower", "upper", "source"});
    csv.row({y, b.lower, source == "greedy" ? blank() : Cell(b.upper), source});
  }
  run.manifest.add_output("tuples.csv", run.path("tuples.csv"));
  if (!witness.empty()) {
    primespan::CsvWriter csv(run.path("witness.csv"), {"index", "offset"});
    for (std::size_t i = 0; i < witness.size(); ++i)
      csv.row({static_cast<uint64_t>(i), witness[i]});
    csv.close();
    run.manifest.add_output("witness.csv", run.path("witness.csv"));
  }
  run.finish();
  std::printf("tuples: y=%" PRId64 " lower=%" PRId64 " source=%s -> %s\n", y, b.lower,
              source.c_str(), run.path("tuples.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Args& a) {
  primespan::ModelConfig cfg;
  auto mode = get(a, "mode").value_or("cramer");
  if (mode == "cramer")
    cfg.mode = primespan::SimMode::cramer;
  else if (mode == "modified")
    cfg.mode = primespan::SimMode::modified;
  else
    throw usage_error("--mode: cramer or modified");
  cfg.x = to_u64("x", need(a, "x"));
  cfg.y = to_u64("y", need(a, "y"));
  if (auto w = get(a, "windows")) cfg.windows = to_u64("windows", *w);
  if (auto t = get(a, "trials")) cfg.trials = to_u64("trials", *t);
  if (auto s = get(a, "seed")) cfg.seed = to_u64("seed", *s);
  if (auto z = get(a, "z")) cfg.z = static_cast<int>(to_u64("z", *z));
  cfg.threads = threads_of(a);
  check_budget(cfg.x <= 1000000000ull, "simulate: x above 1e9", a);

  Run run(a);
  auto res = primespan::simulate(cfg);
  run.note("kappa", primespan::format_sig(res.kappa));

  if (!res.windows.empty()) {
    {
      primespan::CsvWriter csv(run.path("windows.csv"), {"index", "X", "count"});
      for (const auto& w : res.windows) csv.row({w.index, w.X, w.count});
    }
    run.manifest.add_output("windows.csv", run.path("windows.csv"));
    if (a.on.count("svg")) {
      primespan::SvgPlot plot;
      std::vector<std::pair<double, double>> pts;
      for (const auto& w : res.windows)
        pts.push_back({static_cast<double>(w.X), static_cast<double>(w.count)});
      plot.add_points(pts, 1.5);
      plot.write(run.path("simulate.svg"));
      run.manifest.add_output("simulate.svg", run.path("simulate.svg"));
    }
    run.finish();
    std::printf("simulate: %zu windows, counts in [%" PRIu64 ", %" PRIu64 "] -> %s\n",
                res.windows.size(), res.min_window_count(), res.max_window_count(),
                run.path("windows.csv").c_str());
    return 0;
  }

  {
    primespan::CsvWriter csv(run.path("trials.csv"),
                             {"trial", "points", "M", "m", "argmax_X", "argmin_X",
                              "gap_p", "gap", "gap_ratio"});
    for (const auto& t : res.trials)
      csv.row({t.trial, t.points, t.stats.M, t.stats.m, t.stats.argmax_X,
               t.stats.argmin_X, t.max_gap.p, t.max_gap.gap, num(t.max_gap.ratio)});
  }
  run.manifest.add_output("trials.csv", run.path("trials.csv"));
  run.finish();
  std::printf("simulate: %zu trials -> %s\n", res.trials.size(),
              run.path("trials.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const Args& a) {
  uint64_t x = to_u64("x", need(a, "x"));
  if (x < 16) throw usage_error("predict: need x >= 16");
  double lx = std::log(static_cast<double>(x));
  auto ys = y_grid(a, lx);
  double cp = c_plus_of(a), cm = c_minus_of(a);
  auto mode = log_mode_of(a);

  Run run(a);
  run.note("c_plus_used", primespan::format_sig(cp));
  run.note("c_minus_used", primespan::format_sig(cm));

  std::vector<std::pair<double, double>> ucurve, lcurve;
  {
    primespan::CsvWriter csv(run.path("predict.csv"),
                             {"y", "t", "L_pred", "u_minus_scaled", "u_plus_scaled",
                              "y_over_logx"});
    for (uint64_t y : ys) {
      double yd = static_cast<double>(y);
      double t = yd / (lx * lx);
      Cell lp = blank();
      try {
        double v = mode == primespan::LogMode::refined
                       ? primespan::L_pred_refined(static_cast<double>(x), yd)
                       : primespan::L_pred(static_cast<double>(x), yd);
        lp = v;
        lcurve.push_back({yd, v});
      } catch (const std::domain_error&) {
      }
      auto pred = primespan::make_sieve_prediction(x, y, cp, cm);
      csv.row({y, num(t), lp, num(pred.m_pred), num(pred.M_pred), num(yd / lx)});
      ucurve.push_back({yd, pred.M_pred});
    }
  }
  run.manifest.add_output("predict.csv", run.path("predict.csv"));

  if (a.on.count("svg")) {
    primespan::SvgPlot plot;
    plot.add_curve(ucurve);
    if (!lcurve.empty()) plot.add_curve(lcurve, "#1e8449");
    double top = 1.0;
    for (const auto& p : ucurve) top = std::max(top, p.second);
    plot.add_curve({{lx, 0.0}, {lx, top}}, "#666666", 1.0, true);
    plot.write(run.path("predict.svg"));
    run.manifest.add_output("predict.svg", run.path("predict.svg"));
  }
  run.finish();
  std::printf("predict: %zu rows at x=%" PRIu64 " -> %s\n", ys.size(), x,
              run.path("predict.csv").c_str());
  return 0;
}

// ---------------------------------------------------------------- ratio

int cmd_ratio(const Args& a) {
  uint64_t x = to_u64("x", need(a, "x"));
  if (x < 100) throw usage_error("ratio: need x >= 100");
  check_budget(x <= 1000000000ull, "ratio: x above 1e9", a);
  double lx = std::log(static_cast<double>(x));
  double cp = c_plus_of(a);

  std::vector<uint64_t> ys;
  if (a.on.count("grid")) {
    double lx2 = lx * lx;
    for (int i = 10; i <= 60; ++i) {
      uint64_t y = static_cast<uint64_t>(std::llround(lx2 * i / 30.0));
      if (y >= 1 && (ys.empty() || y != ys.back())) ys.push_back(y);
    }
  } else {
    ys.push_back(to_u64("y", need(a, "y")));
  }

  Run run(a);
  auto points = primespan::ratio_statistic(x, ys);
  std::vector<std::pair<double, double>> rpts, rcurve;
  {
    primespan::CsvWriter csv(run.path("ratio.csv"),
                             {"y", "t", "M_y", "M_2y", "ratio", "rho_plus_pred"});
    for (const auto& p : points) {
      double t = static_cast<double>(p.y) / (lx * lx);
      double pred = primespan::rho_plus_ratio(t, cp);
      csv.row({p.y, num(t), p.M_y, p.M_2y, num(p.ratio), num(pred)});
      rpts.push_back({t, p.ratio});
      rcurve.push_back({t, pred});
    }
  }
  run.manifest.add_output("ratio.csv", run.path("ratio.csv"));

  if (a.on.count("svg")) {
    primespan::SvgPlot plot;
    plot.add_points(rpts);
    plot.add_curve(rcurve);
    plot.write(run.path("ratio.svg"));
    run.manifest.add_output("ratio.svg", run.path("ratio.svg"));
  }
  run.finish();
  std::printf("ratio: %zu rows at x=%" PRIu64 " -> %s\n", points.size(), x,
              run.path("ratio.csv").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  try {
    a = parse_args(argc, argv);
    if (a.sub == "scan") return cmd_scan(a);
    if (a.sub == "gaps") return cmd_gaps(a);
    if (a.sub == "wheel") return cmd_wheel(a);
    if (a.sub == "dist") return cmd_dist(a);
    if (a.sub == "tuples") return cmd_tuples(a);
    if (a.sub == "simulate") return cmd_simulate(a);
    if (a.sub == "predict") return cmd_predict(a);
    return cmd_ratio(a);
  } catch (const usage_error& e) {
    std::fprintf(stderr, "primespan: %s\n%s", e.what(), kUsage);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "primespan %s: %s\n", a.sub.c_str(), e.what());
    return 2;
  } catch (const primespan::budget_error& e) {
    std::fprintf(stderr, "primespan %s: %s\n", a.sub.c_str(), e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "primespan %s: %s\n", a.sub.c_str(), e.what());
    return 1;
  }
}
