#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewgof/csv.hpp"
#include "skewgof/gof.hpp"
#include "skewgof/svg.hpp"

// Study configuration: a flat sectioned key=value file.  One [study] section
// sets the protocol and grid; each [truth] section adds one data-generating
// cell.  Keys mirror the CLI flags.  Full-line comments start with # or ;.
//
//   [study]
//   name = sl-size
//   protocol = warp              # warp | simple
//   family = sl                  # family under test
//   n = 100 250                  # sample-size grid
//   m = n                        # "n" ties m to n, or a fixed count
//   M = 1000                     # Monte Carlo replications
//   L = 1000                     # power replications (simple protocol)
//   delta = 0.05
//   kernel = gaussian            # gaussian | stable:b | genlaplace:b
//   seed = 20240817
//   null = {...}                 # fixed-shape null spec (simple protocol)
//   svg = curves.svg             # optional power-curve plot
//   x_axis = n                   # n | label (power-curve abscissa)
//
//   [truth]
//   label = nu=5
//   spec = {"family":"st", ...}

namespace skewgof {

struct StudyCell {
  std::string label;
  FamilySpec spec;
};

struct StudyConfig {
  std::string name = "study";
  TestMode protocol = TestMode::composite;  // "warp" in the file
  Family family = Family::sn;
  std::vector<std::size_t> n_grid;
  long long m_fixed = -1;  // -1: m = n
  std::size_t M = 1000, L = 1000;
  double delta = 0.05;
  KernelSpec kernel = KernelSpec::gaussian();
  std::uint64_t seed = 1;
  bool has_null = false;
  FamilySpec null0;
  std::vector<StudyCell> truths;
  std::string svg;
  std::string x_axis;  // "n" (default for grids) or "label"

  std::size_t m_for(std::size_t n) const {
    return m_fixed < 0 ? n : static_cast<std::size_t>(m_fixed);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline FamilySpec spec_from_text(const std::string& text, const std::string& key) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument("config key '" + key + "': bad JSON: " + e.what());
  }
  return spec_from_json(j);
}

}  // namespace detail

inline StudyConfig parse_study_config(const std::string& text) {
  StudyConfig cfg;
  std::istringstream in(text);
  std::string line;
  enum { none, study, truth } section = none;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t == "[study]") {
        section = study;
      } else if (t == "[truth]") {
        section = truth;
        cfg.truths.push_back({"truth-" + std::to_string(cfg.truths.size() + 1), FamilySpec{}});
      } else {
        fail("unknown section " + t);
      }
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (section == study) {
      if (key == "name") {
        cfg.name = val;
      } else if (key == "protocol") {
        if (val == "warp")
          cfg.protocol = TestMode::composite;
        else if (val == "simple")
          cfg.protocol = TestMode::simple;
        else
          fail("protocol must be warp or simple");
      } else if (key == "family") {
        cfg.family = family_from_name(val);
      } else if (key == "n") {
        std::istringstream ns(val);
        long long v;
        while (ns >> v) {
          if (v < 4) fail("n values must be at least 4");
          cfg.n_grid.push_back(static_cast<std::size_t>(v));
        }
        if (cfg.n_grid.empty()) fail("n needs at least one value");
      } else if (key == "m") {
        if (val == "n") {
          cfg.m_fixed = -1;
        } else {
          cfg.m_fixed = std::stoll(val);
          if (cfg.m_fixed < 1) fail("m must be positive or the literal n");
        }
      } else if (key == "M") {
        cfg.M = static_cast<std::size_t>(std::stoull(val));
      } else if (key == "L") {
        cfg.L = static_cast<std::size_t>(std::stoull(val));
      } else if (key == "delta") {
        cfg.delta = std::stod(val);
        if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail("delta must lie in (0,1)");
      } else if (key == "kernel") {
        cfg.kernel = KernelSpec::parse(val);
      } else if (key == "seed") {
        cfg.seed = std::stoull(val);
      } else if (key == "null") {
        cfg.null0 = detail::spec_from_text(val, key);
        cfg.has_null = true;
      } else if (key == "svg") {
        cfg.svg = val;
      } else if (key == "x_axis") {
        if (val != "n" && val != "label") fail("x_axis must be n or label");
        cfg.x_axis = val;
      } else {
        fail("unknown [study] key '" + key + "'");
      }
    } else if (section == truth) {
      if (key == "label") {
        cfg.truths.back().label = val;
      } else if (key == "spec") {
        cfg.truths.back().spec = detail::spec_from_text(val, key);
      } else {
        fail("unknown [truth] key '" + key + "'");
      }
    } else {
      fail("key before any section");
    }
  }
  // an empty grid (no [truth] sections) is legal and yields an empty report
  if (!cfg.truths.empty() && cfg.n_grid.empty())
    throw std::invalid_argument("config: [study] n is required");
  for (const auto& cell : cfg.truths) validate_spec(cell.spec);
  if (cfg.protocol == TestMode::simple && !cfg.has_null && !cfg.truths.empty())
    throw std::invalid_argument("config: simple protocol needs a null spec");
  return cfg;
}

inline StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

// Cells run in n-major order; the seed path layout is
//   warp:   seed.child(flat cell index).child(replication).child(stage)
//   simple: seed.child(n index).child(0 | 1 + truth index).child(rep).child(stage)
// A cell that fails outright is reported with a NaN rate and the error in its
// notes; remaining cells still run.  An optional callback sees each finished
// cell (for progress printing).
inline std::vector<StudyReport> run_study(
    const StudyConfig& cfg, int threads,
    const std::function<void(const StudyReport&)>& on_cell = nullptr) {
  std::vector<StudyReport> cells;
  SeedSpec base{cfg.seed, {}};
  auto failed_cell = [&](const std::string& label, std::size_t n, std::size_t m,
                         const FamilySpec& truth, const std::string& why) {
    StudyReport rep;
    rep.label = label;
    rep.null_family = cfg.family;
    rep.mode = cfg.protocol;
    rep.n = n;
    rep.m = m;
    rep.M = cfg.M;
    rep.delta = cfg.delta;
    rep.kernel = cfg.kernel;
    rep.truth = truth;
    rep.rejection_rate = std::numeric_limits<double>::quiet_NaN();
    rep.critical_value = std::numeric_limits<double>::quiet_NaN();
    rep.notes = "cell failed: " + why;
    return rep;
  };
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::size_t n = cfg.n_grid[i];
    const std::size_t m = cfg.m_for(n);
    if (cfg.protocol == TestMode::composite) {
      for (std::size_t a = 0; a < cfg.truths.size(); ++a) {
        std::uint64_t flat = i * cfg.truths.size() + a;
        StudyReport rep;
        try {
          rep = warp_speed_study(cfg.truths[a].spec, cfg.family, n, m, cfg.M, cfg.delta,
                                 cfg.kernel, base.child(flat), threads, cfg.truths[a].label);
        } catch (const std::exception& e) {
          rep = failed_cell(cfg.truths[a].label, n, m, cfg.truths[a].spec, e.what());
        }
        if (on_cell) on_cell(rep);
        cells.push_back(std::move(rep));
      }
    } else {
      std::vector<FamilySpec> alts;
      for (const auto& cell : cfg.truths) alts.push_back(cell.spec);
      try {
        SimpleStudyResult res = simple_study(cfg.null0, alts, n, m, cfg.M, cfg.L, cfg.delta,
                                             cfg.kernel, base.child(i), threads);
        for (std::size_t a = 0; a < res.cells.size(); ++a) {
          res.cells[a].label = cfg.truths[a].label;
          if (on_cell) on_cell(res.cells[a]);
          cells.push_back(std::move(res.cells[a]));
        }
      } catch (const std::exception& e) {
        // the whole n-row shares one calibration, so it fails as a unit
        for (std::size_t a = 0; a < cfg.truths.size(); ++a) {
          StudyReport rep = failed_cell(cfg.truths[a].label, n, m, cfg.truths[a].spec, e.what());
          if (on_cell) on_cell(rep);
          cells.push_back(std::move(rep));
        }
      }
    }
  }
  return cells;
}

// One row per cell, for tables and curve re-plotting.
inline void write_study_csv(const std::string& path, const StudyConfig& cfg,
                            const std::vector<StudyReport>& cells) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << "study,protocol,null_family,label,n,m,M,delta,kernel,rejection_rate,critical_value,"
         "completed,skipped,retried\n";
  char buf[64];
  for (const auto& c : cells) {
    out << cfg.name << ',' << test_mode_name(c.mode) << ',' << family_name(c.null_family) << ','
        << c.label << ',' << c.n << ',' << c.m << ',' << c.M << ',';
    std::snprintf(buf, sizeof buf, "%g,", c.delta);
    out << buf << c.kernel.to_string() << ',';
    std::snprintf(buf, sizeof buf, "%.6g,%.17g,", c.rejection_rate, c.critical_value);
    out << buf << c.counts.completed << ',' << c.counts.skipped << ',' << c.counts.retried
        << "\n";
  }
  if (!out) throw data_error("short write to " + path);
}

// Power curves: by default one series per truth over the n grid; with
// x_axis = label, one series total using the first number in each label.
inline std::vector<SvgSeries> study_power_series(const StudyConfig& cfg,
                                                 const std::vector<StudyReport>& cells) {
  std::vector<SvgSeries> series;
  bool by_n = cfg.x_axis.empty() ? cfg.n_grid.size() > 1 : cfg.x_axis == "n";
  if (by_n) {
    for (std::size_t a = 0; a < cfg.truths.size(); ++a) {
      SvgSeries s;
      s.label = cfg.truths[a].label;
      for (const auto& c : cells)
        if (c.label == cfg.truths[a].label) {
          s.x.push_back(static_cast<double>(c.n));
          s.y.push_back(c.rejection_rate);
        }
      series.push_back(std::move(s));
    }
  } else {
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
      SvgSeries s;
      s.label = "n=" + std::to_string(cfg.n_grid[i]);
      for (const auto& c : cells) {
        if (c.n != cfg.n_grid[i]) continue;
        // first numeric token in the label is the abscissa
        const std::string& lab = c.label;
        std::size_t k = lab.find_first_of("0123456789.-");
        if (k == std::string::npos) continue;
        char* end = nullptr;
        double v = std::strtod(lab.c_str() + k, &end);
        if (end == lab.c_str() + k) continue;
        s.x.push_back(v);
        s.y.push_back(c.rejection_rate);
      }
      if (!s.x.empty()) series.push_back(std::move(s));
    }
  }
  return series;
}

}  // namespace skewgof
