// Command-line front end: sampling, fitting, testing, study orchestration,
// and on-demand numeric oracle checks.

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewgof/csv.hpp"
#include "skewgof/gof.hpp"
#include "skewgof/report.hpp"
#include "skewgof/statistic.hpp"
#include "skewgof/study_config.hpp"
#include "skewgof/svg.hpp"
#include "skewgof/version.hpp"

using namespace skewgof;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// JSON argument: inline text, or @path to read a file.
nlohmann::json json_arg(const std::string& s, const std::string& flag) {
  if (!s.empty() && s[0] == '@') {
    std::string path = s.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(flag + ": cannot open " + path);
    try {
      return nlohmann::json::parse(in);
    } catch (const std::exception& e) {
      throw data_error(flag + ": " + path + ": " + e.what());
    }
  }
  try {
    return nlohmann::json::parse(s);
  } catch (const std::exception& e) {
    throw std::invalid_argument(flag + ": bad JSON: " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

void emit_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json(path, j);
}

nlohmann::json input_summary(const std::string& path, const NumericCsv& d) {
  nlohmann::json j;
  j["path"] = path;
  j["n"] = d.data.n();
  j["p"] = d.data.p();
  j["columns"] = d.names;
  j["dropped_rows"] = d.dropped;
  return j;
}

int cmd_sample(const std::string& spec_text, std::size_t n, std::uint64_t seed,
               const std::string& out) {
  FamilySpec spec = spec_from_json(json_arg(spec_text, "--spec"));
  RandomStream g(SeedSpec{seed, {}});
  Sample x = sample_any(spec, n, g);
  if (out.empty())
    write_csv(std::cout, x);
  else
    write_csv(out, x);
  return 0;
}

int cmd_fit(const std::string& in, const std::string& family, const std::string& columns,
            bool drop_missing, std::uint64_t seed, int threads, const std::string& out) {
  Timer timer;
  Family fam = family_from_name(family);
  NumericCsv d = read_csv(in, split_list(columns), drop_missing);
  FitResult fr = fit_full(d.data, fam);
  nlohmann::json j;
  j["command"] = "fit";
  j["family"] = family_name(fam);
  j["input"] = input_summary(in, d);
  j["fit"] = fit_to_json(fr);
  j["run"] = run_metadata(SeedSpec{seed, {}}, threads, timer.seconds());
  emit_json(out, j);
  return 0;
}

int cmd_gof(const std::string& in, const std::string& family, const std::string& mode,
            const std::string& lambda0, const std::string& columns, bool drop_missing,
            long long m_flag, std::size_t reps, double delta, const std::string& kernel,
            std::uint64_t seed, int threads, const std::string& out) {
  Timer timer;
  Family fam = family_from_name(family);
  KernelSpec ker = KernelSpec::parse(kernel);
  NumericCsv d = read_csv(in, split_list(columns), drop_missing);
  const std::size_t n = d.data.n();
  const std::size_t m = m_flag > 0 ? static_cast<std::size_t>(m_flag) : std::max<std::size_t>(n, 1000);

  TestOutcome outcome;
  if (mode == "composite") {
    outcome = composite_test(d.data, fam, m, reps, delta, ker, SeedSpec{seed, {}}, threads);
  } else if (mode == "simple") {
    if (lambda0.empty())
      throw std::invalid_argument("--mode simple needs --lambda0 (null spec with frozen shape)");
    FamilySpec null0 = spec_from_json(json_arg(lambda0, "--lambda0"));
    if (family_of(null0) != fam)
      throw std::invalid_argument("--lambda0 family does not match --family");
    outcome = simple_test(d.data, null0, m, reps, delta, ker, SeedSpec{seed, {}}, threads);
  } else {
    throw std::invalid_argument("--mode must be composite or simple");
  }

  nlohmann::json j;
  j["command"] = "gof";
  j["family"] = family_name(fam);
  j["input"] = input_summary(in, d);
  j["m"] = m;
  j["outcome"] = outcome_to_json(outcome);
  j["run"] = run_metadata(SeedSpec{seed, {}}, threads, timer.seconds());
  emit_json(out, j);
  std::fprintf(stderr, "T = %.6g", outcome.statistic.value);
  if (outcome.p_value >= 0.0) std::fprintf(stderr, ", p = %.4g", outcome.p_value);
  std::fprintf(stderr, ", reject at %g%%: %s\n", 100.0 * delta, outcome.reject ? "yes" : "no");
  return 0;
}

int cmd_study(const std::string& config_path, std::string prefix, bool seed_set,
              std::uint64_t seed, int threads) {
  Timer timer;
  StudyConfig cfg = load_study_config(config_path);
  if (seed_set) cfg.seed = seed;
  if (prefix.empty()) {
    std::filesystem::path p(config_path);
    p.replace_extension();
    prefix = p.string();
  }

  std::vector<StudyReport> cells = run_study(cfg, threads, [](const StudyReport& c) {
    std::fprintf(stderr, "cell %-16s n=%-5zu rate=%.4f  completed=%zu skipped=%zu%s%s\n",
                 c.label.c_str(), c.n, c.rejection_rate, c.counts.completed, c.counts.skipped,
                 c.notes.empty() ? "" : "  ", c.notes.c_str());
  });

  write_study_csv(prefix + ".csv", cfg, cells);
  nlohmann::json j;
  j["command"] = "study";
  j["study"] = cfg.name;
  j["config"] = config_path;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) j["cells"].push_back(study_report_to_json(c));
  j["run"] = run_metadata(SeedSpec{cfg.seed, {}}, threads, timer.seconds());
  write_json(prefix + ".json", j);
  std::fprintf(stderr, "wrote %s.csv and %s.json\n", prefix.c_str(), prefix.c_str());

  if (!cfg.svg.empty() && !cells.empty()) {
    std::vector<SvgSeries> series = study_power_series(cfg, cells);
    if (!series.empty()) {
      std::filesystem::path sp(cfg.svg);
      if (sp.is_relative()) sp = std::filesystem::path(prefix).parent_path() / sp;
      write_power_svg(sp.string(), series, cfg.delta,
                      (cfg.x_axis == "label" || cfg.n_grid.size() == 1) ? "alternative" : "n",
                      cfg.name);
      std::fprintf(stderr, "wrote %s\n", sp.string().c_str());
    }
  }
  return 0;
}

// Random small instances for the statistic-vs-integration oracle.
int cmd_oracle_check(std::size_t instances, std::size_t draws, std::uint64_t seed,
                     const std::string& kernel, int threads, const std::string& out) {
  KernelSpec ker = KernelSpec::parse(kernel);
  nlohmann::json checks = nlohmann::json::array();
  bool all_ok = true;
  SeedSpec root{seed, {}};

  for (std::size_t k = 0; k < instances; ++k) {
    RandomStream g(root.child(k));
    std::size_t p = 1 + static_cast<std::size_t>(g.uniform01() * 3.0);
    if (p > 3) p = 3;
    std::size_t n = 5 + static_cast<std::size_t>(g.uniform01() * 45.0);
    std::size_t m = 5 + static_cast<std::size_t>(g.uniform01() * 45.0);
    Sample x(n, p), x0(m, p);
    double scale = 0.5 + g.uniform01();
    double shift = 2.0 * g.uniform01() - 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) x(i, j) = scale * g.normal() + shift;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < p; ++j) x0(i, j) = scale * g.normal();
    StatValue t = t_stat(x, x0, ker, threads);
    OracleEstimate o = mc_oracle(x, x0, ker, draws, root.child(1000 + k), threads);
    double dev = std::fabs(t.value - o.estimate);
    double margin = o.std_error > 0.0 ? dev / o.std_error : 0.0;
    bool ok = dev <= 4.0 * o.std_error;
    all_ok = all_ok && ok;
    std::printf("%-4s statistic-integration instance=%zu n=%zu m=%zu p=%zu |dev|/se=%.2f\n",
                ok ? "ok" : "FAIL", k, n, m, p, margin);
    checks.push_back({{"oracle", "statistic-integration"},
                      {"instance", k},
                      {"n", n},
                      {"m", m},
                      {"p", p},
                      {"statistic", t.value},
                      {"integral", o.estimate},
                      {"std_error", o.std_error},
                      {"pass", ok}});
  }

  // sampler-vs-CF checks on the families with closed characteristic functions
  struct CfCase {
    const char* name;
    FamilySpec spec;
  };
  SnParams sn;
  sn.xi = {0.3, -0.2};
  sn.omega = Matrix(2, 2);
  sn.omega(0, 0) = 1.5;
  sn.omega(0, 1) = sn.omega(1, 0) = 0.4;
  sn.omega(1, 1) = 0.8;
  sn.alpha = {2.0, -1.0};
  SlParams sl;
  sl.xi = {0.1, 0.2};
  sl.omega = sn.omega;
  sl.alpha = {0.8, -0.3};
  AsParams as = regular_polygon_measure(3, 1.5);
  std::vector<CfCase> cases = {{"sn-cf", sn}, {"sl-cf", sl}, {"as-cf", as}};
  const std::size_t cf_draws = 100000;
  const double cf_tol = 0.016;  // ~5 sigma of the ECF modulus error at 1e5 draws
  for (std::size_t c = 0; c < cases.size(); ++c) {
    RandomStream g(root.child(2000 + c));
    Sample x = sample_any(cases[c].spec, cf_draws, g);
    RandomStream gt(root.child(3000 + c));
    double maxerr = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vec t(2);
      double r = 0.2 + 1.3 * gt.uniform01();
      double ang = 2.0 * pi_const * gt.uniform01();
      t[0] = r * std::cos(ang);
      t[1] = r * std::sin(ang);
      std::complex<double> emp(0.0, 0.0);
      for (std::size_t i = 0; i < cf_draws; ++i) {
        double arg = t[0] * x(i, 0) + t[1] * x(i, 1);
        emp += std::complex<double>(std::cos(arg), std::sin(arg));
      }
      emp /= static_cast<double>(cf_draws);
      std::complex<double> th = std::visit(
          [&](const auto& par) -> std::complex<double> {
            using T = std::decay_t<decltype(par)>;
            if constexpr (std::is_same_v<T, SnParams>) return cf_sn(par, t);
            else if constexpr (std::is_same_v<T, SlParams>) return cf_sl(par, t);
            else if constexpr (std::is_same_v<T, AsParams>) return cf_as(par, t);
            else throw std::logic_error("no closed CF");
          },
          cases[c].spec);
      maxerr = std::max(maxerr, std::abs(emp - th));
    }
    bool ok = maxerr <= cf_tol;
    all_ok = all_ok && ok;
    std::printf("%-4s %s max|ecf-cf|=%.5f tol=%.3f\n", ok ? "ok" : "FAIL", cases[c].name, maxerr,
                cf_tol);
    checks.push_back(
        {{"oracle", cases[c].name}, {"max_error", maxerr}, {"tolerance", cf_tol}, {"pass", ok}});
  }

  if (!out.empty()) {
    nlohmann::json j;
    j["command"] = "oracle-check";
    j["checks"] = checks;
    j["all_pass"] = all_ok;
    j["run"] = run_metadata(root, threads, 0.0);
    write_json(out, j);
  }
  if (!all_ok) throw numeric_error("oracle check failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goodness-of-fit tests for multivariate skewed families via weighted integrals "
               "of the empirical characteristic function"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version_string));

  std::uint64_t seed = 1;
  int threads = 0;
  std::string kernel = "gaussian";
  std::string out;

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Draw from a family spec, write CSV");
  std::string spec_text;
  std::size_t sample_n = 0;
  sample_cmd->add_option("--spec", spec_text, "family spec JSON (inline or @file)")->required();
  sample_cmd->add_option("-n,--n", sample_n, "number of rows")->required()
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed, "master seed");
  sample_cmd->add_option("-o,--out", out, "output CSV (default stdout)");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a family to CSV data");
  std::string in_path, family, columns;
  bool drop_missing = false;
  fit_cmd->add_option("-i,--input", in_path, "input CSV")->required();
  fit_cmd->add_option("--family", family, "sn|st|sl|gh|as")->required();
  fit_cmd->add_option("--columns", columns, "comma-separated column names or 1-based indices");
  fit_cmd->add_flag("--drop-missing", drop_missing, "drop rows with missing values");
  fit_cmd->add_option("--seed", seed, "master seed (recorded in the report)");
  fit_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  fit_cmd->add_option("-o,--out", out, "output JSON (default stdout)");

  // gof
  auto* gof_cmd = app.add_subcommand("gof", "Goodness-of-fit test on CSV data");
  std::string mode = "composite", lambda0;
  long long m_flag = 0;
  std::size_t reps = 500;
  double delta = 0.05;
  gof_cmd->add_option("-i,--input", in_path, "input CSV")->required();
  gof_cmd->add_option("--family", family, "sn|st|sl|gh|as")->required();
  gof_cmd->add_option("--mode", mode, "composite (default) or simple");
  gof_cmd->add_option("--lambda0", lambda0,
                      "simple mode: null spec JSON with the shape to freeze (inline or @file)");
  gof_cmd->add_option("--columns", columns, "comma-separated column names or 1-based indices");
  gof_cmd->add_flag("--drop-missing", drop_missing, "drop rows with missing values");
  gof_cmd->add_option("-m", m_flag, "reference sample size (default max{n,1000})");
  gof_cmd->add_option("-B,--replications", reps,
                      "bootstrap cycles (composite) or null replications (simple)");
  gof_cmd->add_option("--delta", delta, "nominal level")->check(CLI::Range(1e-6, 0.999999));
  gof_cmd->add_option("--kernel", kernel, "gaussian | stable:<b> | genlaplace:<b>");
  gof_cmd->add_option("--seed", seed, "master seed");
  gof_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  gof_cmd->add_option("-o,--out", out, "output JSON (default stdout)");

  // study
  auto* study_cmd = app.add_subcommand("study", "Run a study config (size/power grids)");
  std::string config_path, prefix;
  study_cmd->add_option("--config", config_path, "study config file")->required();
  study_cmd->add_option("--out-prefix", prefix, "artifact prefix (default: config path stem)");
  auto* study_seed = study_cmd->add_option("--seed", seed, "override the config seed");
  study_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

  // oracle-check
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Statistic and sampler oracles");
  std::size_t instances = 20, draws = 200000;
  oracle_cmd->add_option("--instances", instances, "statistic-integration instances")
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--draws", draws, "integration draws per instance")
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--kernel", kernel, "gaussian | stable:<b> | genlaplace:<b>");
  oracle_cmd->add_option("--seed", seed, "master seed");
  oracle_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  oracle_cmd->add_option("-o,--out", out, "also write a JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample_cmd->parsed()) return cmd_sample(spec_text, sample_n, seed, out);
    if (fit_cmd->parsed()) return cmd_fit(in_path, family, columns, drop_missing, seed, threads, out);
    if (gof_cmd->parsed())
      return cmd_gof(in_path, family, mode, lambda0, columns, drop_missing, m_flag, reps, delta,
                     kernel, seed, threads, out);
    if (study_cmd->parsed())
      return cmd_study(config_path, prefix, study_seed->count() > 0, seed, threads);
    if (oracle_cmd->parsed())
      return cmd_oracle_check(instances, draws, seed, kernel, threads, out);
  } catch (const data_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}
