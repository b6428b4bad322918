#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <vector>

#include "primespan/csv.hpp"
#include "primespan/errors.hpp"
#include "primespan/manifest.hpp"
#include "primespan/rng.hpp"
#include "primespan/sha256.hpp"
#include "primespan/svg.hpp"
#include "primespan/threading.hpp"

using namespace primespan;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("counter rng reference words") {
  CounterRng r0(0);
  REQUIRE(r0.word(0, 0) == 0xdc35d6a8e2016e34ull);
  REQUIRE(r0.unit(0, 0) == Catch::Approx(0.86019651053539337).epsilon(0).margin(0));

  CounterRng r1(1);
  REQUIRE(r1.word(2, 3) == 0x5095fb1cfb5d54b7ull);
  REQUIRE(r1.unit(2, 3) == Catch::Approx(0.31478852708402383).epsilon(0).margin(0));

  CounterRng r2(12345);
  REQUIRE(r2.word(0, 1) == 0xe2462555909897f5ull);
  REQUIRE(r2.unit(0, 1) == Catch::Approx(0.8838828405283456).epsilon(0).margin(0));

  CounterRng r3(0xDEADBEEFull);
  REQUIRE(r3.word(7, uint64_t{1} << 40) == 0xa4964f271f163b6aull);
  REQUIRE(r3.unit(7, uint64_t{1} << 40) ==
          Catch::Approx(0.6429185362349806).epsilon(0).margin(0));
}

TEST_CASE("counter rng structure") {
  REQUIRE(mix64(0) == 0);
  CounterRng r(99);
  SECTION("unit lies in [0,1) and uses the top 53 bits") {
    for (uint64_t c = 0; c < 1000; ++c) {
      double u = r.unit(3, c);
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      REQUIRE(u == static_cast<double>(r.word(3, c) >> 11) * 0x1.0p-53);
    }
  }
  SECTION("streams decorrelate identical counters") {
    int same = 0;
    for (uint64_t c = 0; c < 1000; ++c)
      if ((r.word(0, c) & 0xFFFF) == (r.word(1, c) & 0xFFFF)) ++same;
    REQUIRE(same < 20);  // chance level ~ 1000/65536
  }
  SECTION("below stays in range") {
    for (uint64_t c = 0; c < 300; ++c) REQUIRE(r.below(5, c, 7) < 7);
  }
  SECTION("same seed same words, different seed different words") {
    CounterRng a(7), b(7), c(8);
    REQUIRE(a.word(1, 2) == b.word(1, 2));
    REQUIRE(a.word(1, 2) != c.word(1, 2));
  }
}

TEST_CASE("six significant digit formatting") {
  REQUIRE(format_sig(3.9079432) == "3.90794");
  REQUIRE(format_sig(0.0030543) == "0.0030543");
  REQUIRE(format_sig(0.73951234) == "0.739512");
  REQUIRE(format_sig(1600.0) == "1600");
  REQUIRE(format_sig(1796.6748) == "1796.67");
  REQUIRE(format_sig(1e8) == "1e+08");
  REQUIRE(format_sig(-2.5) == "-2.5");
  REQUIRE(cell_text(Cell{uint64_t{163200}}) == "163200");
  REQUIRE(cell_text(Cell{int64_t{-7}}) == "-7");
  REQUIRE(cell_text(Cell{28}) == "28");
  REQUIRE(cell_text(Cell{"abc"}) == "abc");
  REQUIRE(cell_text(Cell{3.907943}) == "3.90794");
}

TEST_CASE("csv writer emits exact rows") {
  const std::string path = "test_io_tmp.csv";
  {
    CsvWriter w(path, {"N", "C", "c_N"});
    w.row({uint64_t{68}, uint64_t{28}, 28.0 / 2310.0});
    w.row({uint64_t{73}, uint64_t{64}, 64.0 / 2310.0});
  }
  REQUIRE(slurp(path) == "N,C,c_N\n68,28,0.0121212\n73,64,0.0277056\n");
  {
    CsvWriter w(path, {"a", "b"});
    REQUIRE_THROWS_AS(w.row({1}), std::logic_error);
  }
  std::remove(path.c_str());
}

TEST_CASE("sha256 reference digests") {
  REQUIRE(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  REQUIRE(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::string path = "test_io_digest.bin";
  {
    std::ofstream f(path, std::ios::binary);
    f << "abc";
  }
  REQUIRE(sha256_hex_of_file(path) == sha256_hex("abc"));
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(sha256_hex_of_file("does_not_exist.bin"), std::runtime_error);
}

TEST_CASE("manifest emits sorted stable json") {
  const std::string out_csv = "test_io_mani.csv";
  {
    std::ofstream f(out_csv, std::ios::binary);
    f << "abc";
  }
  RunManifest m;
  m.subcommand = "scan";
  m.parameters = {{"y", "10"}, {"x", "1000"}};  // insertion unsorted on purpose
  m.seed = 42;
  m.version = "1.0.0";
  m.wall_seconds = 0.1234;
  m.add_output("out.csv", out_csv);
  const std::string path = "test_io_mani.json";
  m.write(path);
  const std::string expect =
      "{\n"
      "  \"digests\": {\n"
      "    \"out.csv\": \"ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\"\n"
      "  },\n"
      "  \"parameters\": {\n"
      "    \"x\": \"1000\",\n"
      "    \"y\": \"10\"\n"
      "  },\n"
      "  \"seed\": 42,\n"
      "  \"subcommand\": \"scan\",\n"
      "  \"version\": \"1.0.0\",\n"
      "  \"wall_seconds\": 0.123\n"
      "}\n";
  REQUIRE(slurp(path) == expect);
  std::remove(path.c_str());
  std::remove(out_csv.c_str());

  REQUIRE(json_escape("a\"b\\c\nd") == "a\\\"b\\\\c\\nd");
}

TEST_CASE("parallel blocks partition independent of thread count") {
  auto run = [](int threads) {
    std::mutex mu;
    std::map<uint64_t, std::pair<uint64_t, uint64_t>> blocks;
    uint64_t total = 0;
    parallel_blocks(10, 1010, threads, 64, [&](uint64_t b, uint64_t lo, uint64_t hi) {
      uint64_t s = 0;
      for (uint64_t v = lo; v < hi; ++v) s += v;
      std::lock_guard<std::mutex> lk(mu);
      blocks[b] = {lo, hi};
      total += s;
    });
    return std::make_pair(blocks, total);
  };
  auto [b1, t1] = run(1);
  auto [b3, t3] = run(3);
  REQUIRE(b1 == b3);
  REQUIRE(t1 == t3);
  REQUIRE(t1 == (10 + 1009) * uint64_t{1000} / 2);
  uint64_t expect_lo = 10;
  for (const auto& [b, range] : b1) {
    REQUIRE(range.first == expect_lo);
    expect_lo = range.second;
  }
  REQUIRE(expect_lo == 1010);
}

TEST_CASE("error taxonomy") {
  REQUIRE_THROWS_AS(throw budget_error("x"), std::runtime_error);
  REQUIRE_THROWS_AS(throw parse_error("x"), std::runtime_error);
}

TEST_CASE("svg output is self contained and stable") {
  SvgPlot p;
  p.add_points({{1, 2}, {2, 2.5}, {3, 4}});
  p.add_curve({{1, 1.8}, {3, 3.9}});
  p.add_hline(std::log(1e6));
  auto a = p.render();
  REQUIRE(a == p.render());
  REQUIRE(a.find("<svg xmlns=\"http://www.w3.org/2000/svg\"") == 0);
  REQUIRE(a.find("<polyline") != std::string::npos);
  REQUIRE(a.find("<circle") != std::string::npos);
  REQUIRE(a.find("<rect") != std::string::npos);
  REQUIRE(a.find("stroke-dasharray") != std::string::npos);
  // primitives only: no text, no script, no external references
  REQUIRE(a.find("<text") == std::string::npos);
  REQUIRE(a.find("href") == std::string::npos);
}
