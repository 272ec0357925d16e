#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaylab/prediction.hpp"
#include "delaylab/slices.hpp"

namespace delaylab {

// One registry entry: a system, an observable policy, delay dimensions and
// sample sizes. The JSON echo of a config is sufficient to re-run it.
struct ScenarioConfig {
  std::string id;
  std::string title;
  std::string anchor;  // behavioral tag checked by the registry-completeness test
  std::string system_desc;
  std::string base_observable = "zero";
  std::string alpha_mode = "sampled";  // "fixed" (use alpha_fixed, may be empty) | "sampled"
  int alpha_count = 8;
  double alpha_radius = 1.0;
  std::uint64_t alpha_seed = 101;
  std::vector<double> alpha_fixed;
  std::vector<int> ks{1};
  std::size_t n_points = 200000;
  std::size_t n_queries = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 7;
  int eps_scales = 12;
  int delta_scales = 6;
  int centers = 300;  // slab centers / local-dimension samples / probe centers
};

nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const nlohmann::json& j);

struct AlphaOutcome {
  int k = 0;
  int alpha_index = -1;  // -1 = unperturbed base observable
  std::string verdict;
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::string error;  // estimator failure; scenario continues, aggregate partial
  nlohmann::json details;
};

struct ScenarioResult {
  std::string id;
  bool pass = false;
  bool partial = false;
  double runtime_sec = 0.0;  // written to the metadata sidecar only
  nlohmann::json config_echo;
  nlohmann::json aggregate;
  std::vector<AlphaOutcome> per_alpha;
  std::string schema = "delaylab-result-1";
};

// Deterministic JSON body (no timestamps or runtimes).
nlohmann::json result_to_json(const ScenarioResult& res);

// All registered scenarios: V1..V8 anchor the verified statements, A1/A2 the
// dimension reproductions.
std::vector<ScenarioConfig> scenario_registry();
ScenarioConfig registry_config(const std::string& id);

// Runs one scenario; when out_dir is nonempty writes out_dir/<id>/result.json,
// curve CSVs, plot data and a meta.json sidecar (runtime lives there).
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir = "");

// Summary table over all result.json files under results_dir; one row per
// (scenario, alpha). Writes summary.txt next to the results; returns the text.
std::string report(const std::string& results_dir);

// Shrinks a config for smoke runs (fewer points, alphas, queries).
ScenarioConfig quick_variant(ScenarioConfig cfg);

}  // namespace delaylab
