#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bco/driver.hpp"
#include "bco/serialize.hpp"

namespace bco {

// Architecture and budget defaults per environment. Overridable from config
// files; chosen so each domain trains reliably at its native scale.
struct DomainDefaults {
  std::vector<int> model_hidden;
  std::vector<int> policy_hidden;
  std::int64_t pre_interactions = 0;
  int demo_transition_cap = 0;
};

inline DomainDefaults domain_defaults(const std::string& env_name) {
  if (env_name == "cartpole") return {{}, {}, 1000, 5};
  if (env_name == "mountaincar") return {{8, 8}, {8, 8}, 2000, 50};
  if (env_name == "reacher2d") return {{100, 100}, {32, 32}, 5000, 50};
  if (env_name == "chainworld") return {{32}, {32}, 500, 4};
  throw ConfigError("domain_defaults: unknown environment '" + env_name + "'");
}

// Fully resolved settings for one run, defaults applied.
struct RunSpec {
  std::string env_name;
  double alpha = 0.0;
  std::uint64_t seed = 0;

  // Demonstrations come from a file or are recorded by the scripted expert.
  std::string demo_file;
  int demo_count = 10;
  int demo_transition_cap = 0;

  std::int64_t pre_interactions = 0;
  int max_iterations = 50;
  double improvement_tolerance = 0.01;
  int improvement_patience = 1;
  int probe_episodes = 100;
  int eval_episodes = 1000;
  int baseline_episodes = 200;

  std::vector<int> model_hidden;
  std::vector<int> policy_hidden;
  TrainProtocol protocol;

  BcoConfig to_bco_config() const {
    BcoConfig cfg;
    cfg.env_name = env_name;
    cfg.alpha = alpha;
    cfg.pre_interactions = pre_interactions;
    cfg.max_iterations = max_iterations;
    cfg.improvement_tolerance = improvement_tolerance;
    cfg.improvement_patience = improvement_patience;
    cfg.probe_episodes = probe_episodes;
    cfg.model_hidden = model_hidden;
    cfg.policy_hidden = policy_hidden;
    cfg.protocol = protocol;
    cfg.seed = seed;
    return cfg;
  }
};

inline std::vector<int> int_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError(what + " must be an array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

inline void apply_shared_keys(RunSpec& spec, const json& j) {
  if (j.contains("pre_interactions"))
    spec.pre_interactions = j["pre_interactions"].get<std::int64_t>();
  if (j.contains("demo_transition_cap"))
    spec.demo_transition_cap = j["demo_transition_cap"].get<int>();
  if (j.contains("max_iterations")) spec.max_iterations = j["max_iterations"].get<int>();
  if (j.contains("improvement_tolerance"))
    spec.improvement_tolerance = j["improvement_tolerance"].get<double>();
  if (j.contains("improvement_patience"))
    spec.improvement_patience = j["improvement_patience"].get<int>();
  if (j.contains("probe_episodes")) spec.probe_episodes = j["probe_episodes"].get<int>();
  if (j.contains("eval_episodes")) spec.eval_episodes = j["eval_episodes"].get<int>();
  if (j.contains("baseline_episodes"))
    spec.baseline_episodes = j["baseline_episodes"].get<int>();
  if (j.contains("model_hidden")) spec.model_hidden = int_list(j["model_hidden"], "model_hidden");
  if (j.contains("policy_hidden"))
    spec.policy_hidden = int_list(j["policy_hidden"], "policy_hidden");
  if (j.contains("learning_rate"))
    spec.protocol.adam.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("batch_size")) spec.protocol.batch_size = j["batch_size"].get<int>();
  if (j.contains("max_epochs")) spec.protocol.max_epochs = j["max_epochs"].get<int>();
  if (j.contains("patience")) spec.protocol.patience = j["patience"].get<int>();
}

inline const std::vector<std::string> kSharedKeys = {
    "pre_interactions", "demo_transition_cap", "max_iterations",
    "improvement_tolerance", "improvement_patience", "probe_episodes",
    "eval_episodes", "baseline_episodes", "model_hidden", "policy_hidden",
    "learning_rate", "batch_size", "max_epochs", "patience"};

inline void check_known_keys(const json& j, std::vector<std::string> specific,
                             const std::string& what) {
  specific.insert(specific.end(), kSharedKeys.begin(), kSharedKeys.end());
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const auto& a : specific) ok = ok || key == a;
    if (!ok) throw ConfigError(what + ": unknown key '" + key + "'");
  }
}

inline RunSpec parse_run_spec(const json& j) {
  check_known_keys(j, {"env", "alpha", "seed", "demo_file", "demo_count"}, "run config");
  if (!j.contains("env")) throw ConfigError("run config: 'env' is required");
  RunSpec spec;
  spec.env_name = j["env"].get<std::string>();
  const DomainDefaults d = domain_defaults(spec.env_name);
  spec.model_hidden = d.model_hidden;
  spec.policy_hidden = d.policy_hidden;
  spec.pre_interactions = d.pre_interactions;
  spec.demo_transition_cap = d.demo_transition_cap;

  if (j.contains("alpha")) spec.alpha = j["alpha"].get<double>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("demo_file")) spec.demo_file = j["demo_file"].get<std::string>();
  if (j.contains("demo_count")) spec.demo_count = j["demo_count"].get<int>();
  if (j.contains("demo_file") && j.contains("demo_count"))
    throw ConfigError("run config: give either demo_file or demo_count, not both");
  apply_shared_keys(spec, j);
  if (spec.alpha < 0.0) throw ConfigError("run config: alpha must be >= 0");
  if (spec.demo_file.empty() && spec.demo_count <= 0)
    throw ConfigError("run config: demo_count must be > 0");
  return spec;
}

// A grid expands to one run per (env, demo_count, alpha, seed) tuple; every
// run shares the remaining settings. Per-environment defaults are resolved
// independently for each listed environment.
struct GridSpec {
  std::vector<std::string> env_names;
  std::vector<double> alphas;
  std::vector<int> demo_counts;
  std::vector<std::uint64_t> seeds;
  json shared;  // non-sweep keys, applied on top of each env's defaults

  RunSpec spec_for(const std::string& env_name) const {
    json j = shared;
    j["env"] = env_name;
    return parse_run_spec(j);
  }
};

inline GridSpec parse_grid_spec(const json& j) {
  check_known_keys(j, {"env", "envs", "alphas", "demo_counts", "seeds", "n_seeds"},
                   "grid config");
  GridSpec grid;
  if (j.contains("env") && j.contains("envs"))
    throw ConfigError("grid config: give either env or envs, not both");
  if (j.contains("env"))
    grid.env_names.push_back(j["env"].get<std::string>());
  else if (j.contains("envs"))
    for (const auto& e : j["envs"]) grid.env_names.push_back(e.get<std::string>());
  if (grid.env_names.empty()) throw ConfigError("grid config: 'env' or 'envs' is required");

  for (const auto& [key, value] : j.items())
    if (key != "env" && key != "envs" && key != "alphas" && key != "demo_counts" &&
        key != "seeds" && key != "n_seeds")
      grid.shared[key] = value;
  if (grid.shared.is_null()) grid.shared = json::object();
  for (const auto& e : grid.env_names) grid.spec_for(e);  // validate early

  if (!j.contains("alphas")) throw ConfigError("grid config: 'alphas' is required");
  for (const auto& a : j["alphas"]) grid.alphas.push_back(a.get<double>());
  if (grid.alphas.empty()) throw ConfigError("grid config: 'alphas' is empty");

  if (j.contains("demo_counts"))
    for (const auto& n : j["demo_counts"]) grid.demo_counts.push_back(n.get<int>());
  else
    grid.demo_counts.push_back(10);

  if (j.contains("seeds") && j.contains("n_seeds"))
    throw ConfigError("grid config: give either seeds or n_seeds, not both");
  if (j.contains("seeds"))
    for (const auto& s : j["seeds"]) grid.seeds.push_back(s.get<std::uint64_t>());
  else {
    const int n = j.contains("n_seeds") ? j["n_seeds"].get<int>() : 20;
    if (n <= 0) throw ConfigError("grid config: n_seeds must be > 0");
    for (int s = 0; s < n; ++s) grid.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (grid.seeds.empty()) throw ConfigError("grid config: 'seeds' is empty");
  return grid;
}

}  // namespace bco
