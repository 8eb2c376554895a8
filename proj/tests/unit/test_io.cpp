#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "skewgof/csv.hpp"
#include "skewgof/report.hpp"
#include "skewgof/study_config.hpp"
#include "skewgof/svg.hpp"

using namespace skewgof;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("skewgof_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void put(const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }
  std::string slurp() const {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

}  // namespace

TEST_CASE("csv writing and reading round-trips doubles bitwise") {
  Sample x(3, 2);
  x(0, 0) = 1.0 / 3.0;
  x(0, 1) = -2.718281828459045e-17;
  x(1, 0) = 0.1;
  x(1, 1) = 1e300;
  x(2, 0) = -0.0;
  x(2, 1) = 123456789.123456789;

  TempFile f("roundtrip.csv");
  write_csv(f.path, x, {"a", "b"});
  NumericCsv back = read_csv(f.path);
  REQUIRE(back.data.n() == 3);
  REQUIRE(back.data.p() == 2);
  REQUIRE(back.names == std::vector<std::string>{"a", "b"});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) REQUIRE(back.data(i, j) == x(i, j));
}

TEST_CASE("header detection distinguishes names from data") {
  TempFile f("header.csv");
  f.put("alpha,beta\n1,2\n3,4\n");
  RawCsv with = read_csv_raw(f.path);
  REQUIRE(with.header_lines == 1);
  REQUIRE(with.header == std::vector<std::string>{"alpha", "beta"});
  REQUIRE(with.rows.size() == 2);

  f.put("1,2\n3,4\n");
  RawCsv without = read_csv_raw(f.path);
  REQUIRE(without.header_lines == 0);
  REQUIRE(without.rows.size() == 2);

  // quoted cells and blank lines are tolerated
  f.put("\"x\",\"y\"\n\n\"1.5\",2\n");
  RawCsv quoted = read_csv_raw(f.path);
  REQUIRE(quoted.header == std::vector<std::string>{"x", "y"});
  NumericCsv num = csv_to_sample(quoted, {}, false);
  REQUIRE(num.data(0, 0) == 1.5);
}

TEST_CASE("missing and malformed cells raise errors naming line and column") {
  TempFile f("missing.csv");
  f.put("u,v\n1,2\n3,NA\n5,6\n");
  RawCsv raw = read_csv_raw(f.path);

  try {
    csv_to_sample(raw, {}, false);
    FAIL("expected data_error");
  } catch (const data_error& e) {
    std::string msg = e.what();
    REQUIRE(msg.find("line 3") != std::string::npos);
    REQUIRE(msg.find("column v") != std::string::npos);
  }

  NumericCsv dropped = csv_to_sample(raw, {}, true);
  REQUIRE(dropped.dropped == 1);
  REQUIRE(dropped.data.n() == 2);
  REQUIRE(dropped.data(1, 1) == 6.0);

  f.put("u,v\n1,oops\n");
  try {
    csv_to_sample(read_csv_raw(f.path), {}, false);
    FAIL("expected data_error");
  } catch (const data_error& e) {
    std::string msg = e.what();
    REQUIRE(msg.find("line 2") != std::string::npos);
    REQUIRE(msg.find("oops") != std::string::npos);
  }
}

TEST_CASE("column selection accepts header names and 1-based indices") {
  TempFile f("columns.csv");
  f.put("a,b,c\n1,2,3\n4,5,6\n");
  RawCsv raw = read_csv_raw(f.path);
  NumericCsv byname = csv_to_sample(raw, {"c", "a"}, false);
  REQUIRE(byname.data.p() == 2);
  REQUIRE(byname.data(0, 0) == 3.0);
  REQUIRE(byname.data(0, 1) == 1.0);

  NumericCsv byindex = csv_to_sample(raw, {"2"}, false);
  REQUIRE(byindex.data.p() == 1);
  REQUIRE(byindex.data(1, 0) == 5.0);
  REQUIRE(byindex.names == std::vector<std::string>{"b"});

  REQUIRE_THROWS_AS(csv_to_sample(raw, {"zz"}, false), data_error);
  REQUIRE_THROWS_AS(csv_to_sample(raw, {"0"}, false), data_error);
  REQUIRE_THROWS_AS(csv_to_sample(raw, {"4"}, false), data_error);
}

TEST_CASE("study config parses sections, grids and specs") {
  std::string text =
      "# size study\n"
      "[study]\n"
      "name = smoke\n"
      "protocol = warp\n"
      "family = sl\n"
      "n = 50 100\n"
      "m = n\n"
      "M = 40\n"
      "delta = 0.1\n"
      "kernel = stable:1.5\n"
      "seed = 777\n"
      "\n"
      "[truth]\n"
      "label = null itself\n"
      "spec = {\"family\":\"sl\",\"xi\":[0,0],\"omega\":[[1,0],[0,1]],\"alpha\":[3,0]}\n";
  StudyConfig cfg = parse_study_config(text);
  REQUIRE(cfg.name == "smoke");
  REQUIRE(cfg.protocol == TestMode::composite);
  REQUIRE(cfg.family == Family::sl);
  REQUIRE(cfg.n_grid == std::vector<std::size_t>{50, 100});
  REQUIRE(cfg.m_for(50) == 50);
  REQUIRE(cfg.M == 40);
  REQUIRE(cfg.delta == 0.1);
  REQUIRE(cfg.kernel.to_string() == "stable:1.5");
  REQUIRE(cfg.seed == 777);
  REQUIRE(cfg.truths.size() == 1);
  REQUIRE(cfg.truths[0].label == "null itself");
  REQUIRE(family_of(cfg.truths[0].spec) == Family::sl);

  // m can also be a fixed count
  StudyConfig cfg2 = parse_study_config("[study]\nn = 20\nm = 500\n");
  REQUIRE(cfg2.m_for(20) == 500);

  // no truth cells is legal (an empty study)
  StudyConfig cfg3 = parse_study_config("[study]\nn = 20\n");
  REQUIRE(cfg3.truths.empty());
}

TEST_CASE("study config errors carry the offending line number") {
  try {
    parse_study_config("[study]\nname = x\nbogus_key = 3\n");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_study_config("[study]\nn = 2\n");
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
  }
  REQUIRE_THROWS_AS(parse_study_config("x = 1\n"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_study_config("[bogus]\n"), std::invalid_argument);
  // simple protocol requires a null spec once truths exist
  REQUIRE_THROWS_AS(
      parse_study_config("[study]\nprotocol = simple\nn = 20\n[truth]\nspec = "
                         "{\"family\":\"sn\",\"xi\":[0],\"omega\":[[1]],\"alpha\":[0]}\n"),
      std::invalid_argument);
}

TEST_CASE("tiny study run writes consistent csv rows") {
  std::string text =
      "[study]\n"
      "name = tiny\n"
      "protocol = warp\n"
      "family = sn\n"
      "n = 30\n"
      "M = 20\n"
      "seed = 4242\n"
      "[truth]\n"
      "label = size\n"
      "spec = {\"family\":\"sn\",\"xi\":[0,0],\"omega\":[[1,0],[0,1]],\"alpha\":[3,0]}\n";
  StudyConfig cfg = parse_study_config(text);
  std::vector<StudyReport> cells = run_study(cfg, 1);
  REQUIRE(cells.size() == 1);
  REQUIRE(cells[0].label == "size");
  REQUIRE(cells[0].counts.completed > 0);

  TempFile f("study.csv");
  write_study_csv(f.path, cfg, cells);
  std::string body = f.slurp();
  REQUIRE(body.rfind("study,protocol,null_family,label,n,m,M,delta,kernel,rejection_rate,"
                     "critical_value,completed,skipped,retried\n",
                     0) == 0);
  REQUIRE(body.find("tiny,composite,sn,size,30,30,20,0.05,gaussian,") != std::string::npos);

  // single n + label without a numeric token: nothing to put on a numeric axis
  REQUIRE(study_power_series(cfg, cells).empty());

  // an n grid switches the abscissa to n, one series per truth label
  StudyConfig grid = cfg;
  grid.n_grid = {20, 40};
  std::vector<StudyReport> gcells(2, cells[0]);
  gcells[0].n = 20;
  gcells[1].n = 40;
  gcells[1].rejection_rate = 0.25;
  std::vector<SvgSeries> series = study_power_series(grid, gcells);
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].label == "size");
  REQUIRE(series[0].x == std::vector<double>{20.0, 40.0});
  REQUIRE(series[0].y[1] == 0.25);
}

TEST_CASE("report blocks carry the reproducibility fields") {
  SeedSpec seed(20240817);
  nlohmann::json run = run_metadata(seed.child(3), 2, 1.25);
  REQUIRE(run["seed"]["master"] == 20240817);
  REQUIRE(run["seed"]["path"].size() == 1);
  REQUIRE(run["generator"] == "xoshiro256++");
  REQUIRE(run["threads"] == 2);
  REQUIRE(run["version"] == "skewgof 0.1.0");

  ProtocolCounts c{10, 1, 2};
  nlohmann::json jc = counts_to_json(c);
  REQUIRE(jc["completed"] == 10);
  REQUIRE(jc["skipped"] == 1);
  REQUIRE(jc["retried"] == 2);

  FitResult fr;
  fr.params = SnParams{{0.0}, Matrix::diag({1.0}), {2.0}};
  fr.objective = -12.5;
  fr.converged = true;
  fr.iterations = 77;
  nlohmann::json jf = fit_to_json(fr);
  REQUIRE(jf["params"]["family"] == "sn");
  REQUIRE(jf["objective"] == -12.5);
  REQUIRE(jf["converged"] == true);
}

TEST_CASE("outcome json distinguishes the two protocols") {
  TestOutcome o;
  o.mode = TestMode::composite;
  o.statistic = StatValue{0.42, 100, 200};
  o.p_value = 0.031;
  o.reject = true;
  o.delta = 0.05;
  o.estimates = SnParams{{0.0}, Matrix::diag({1.0}), {1.0}};
  nlohmann::json j = outcome_to_json(o);
  REQUIRE(j["mode"] == "composite");
  REQUIRE(j["statistic"]["value"] == 0.42);
  REQUIRE(j["p_value"] == 0.031);
  REQUIRE(!j.contains("critical_value"));  // simple-mode field
  REQUIRE(j["reject"] == true);

  TestOutcome s;
  s.mode = TestMode::simple;
  s.statistic = StatValue{0.99, 50, 50};
  s.p_value = 0.2;
  s.critical_value = 1.5;
  s.estimates = SnParams{{0.0}, Matrix::diag({1.0}), {1.0}};
  nlohmann::json js = outcome_to_json(s);
  REQUIRE(js["mode"] == "simple");
  REQUIRE(js["critical_value"] == 1.5);
}

TEST_CASE("svg writer emits a plottable document") {
  TempFile f("curve.svg");
  SvgSeries a{"nu=5", {100, 250, 500}, {0.2, 0.5, 0.9}};
  SvgSeries b{"nu=10", {100, 250, 500}, {0.1, 0.2, 0.4}};
  write_power_svg(f.path, {a, b}, 0.05, "n", "power against size");
  std::string body = f.slurp();
  REQUIRE(body.rfind("<svg", 0) == 0);
  REQUIRE(body.find("</svg>") != std::string::npos);
  REQUIRE(body.find("nu=5") != std::string::npos);
  REQUIRE(body.find("nu=10") != std::string::npos);
  REQUIRE(body.find("power against size") != std::string::npos);
  REQUIRE(body.find("polyline") != std::string::npos);
}
