#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "skewgof/family.hpp"
#include "skewgof/fit_result.hpp"
#include "skewgof/gof.hpp"
#include "skewgof/version.hpp"

// JSON report shapes.  Every top-level report carries a `run` block with the
// master seed, generator id, thread count, wall time, and version, so any
// published number can be regenerated.

namespace skewgof {

inline nlohmann::json seed_to_json(const SeedSpec& seed) {
  nlohmann::json j;
  j["master"] = seed.master;
  j["path"] = seed.path;
  return j;
}

inline nlohmann::json run_metadata(const SeedSpec& seed, int threads, double wall_seconds) {
  nlohmann::json j;
  j["seed"] = seed_to_json(seed);
  j["generator"] = generator_id;
  j["threads"] = threads;
  j["wall_time_s"] = wall_seconds;
  j["version"] = version_string;
  return j;
}

inline nlohmann::json counts_to_json(const ProtocolCounts& c) {
  return nlohmann::json{{"completed", c.completed}, {"skipped", c.skipped}, {"retried", c.retried}};
}

inline nlohmann::json fit_to_json(const FitResult& r) {
  nlohmann::json j;
  j["params"] = spec_to_json(r.params);
  j["objective"] = r.objective;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline nlohmann::json outcome_to_json(const TestOutcome& o) {
  nlohmann::json j;
  j["mode"] = test_mode_name(o.mode);
  j["statistic"] = {{"value", o.statistic.value}, {"n", o.statistic.n}, {"m", o.statistic.m}};
  if (o.p_value >= 0.0) j["p_value"] = o.p_value;
  if (o.critical_value >= 0.0) j["critical_value"] = o.critical_value;
  j["reject"] = o.reject;
  j["delta"] = o.delta;
  j["estimates"] = spec_to_json(o.estimates);
  j["replications"] = counts_to_json(o.boot);
  if (!o.notes.empty()) j["notes"] = o.notes;
  return j;
}

inline nlohmann::json study_report_to_json(const StudyReport& r) {
  nlohmann::json j;
  j["label"] = r.label;
  j["null_family"] = family_name(r.null_family);
  j["mode"] = test_mode_name(r.mode);
  j["n"] = r.n;
  j["m"] = r.m;
  j["M"] = r.M;
  j["delta"] = r.delta;
  j["kernel"] = r.kernel.to_string();
  j["truth"] = spec_to_json(r.truth);
  j["rejection_rate"] = r.rejection_rate;
  j["critical_value"] = r.critical_value;
  j["replications"] = counts_to_json(r.counts);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw data_error("short write to " + path);
}

}  // namespace skewgof
