#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bco/demos.hpp"
#include "bco/policy.hpp"

namespace bco {

// Plain behavioral cloning from demonstrations that include the true
// actions. Shares the policy fit with the observation-only pipeline and
// takes no environment steps at all.
struct BcConfig {
  std::string env_name;
  std::vector<int> policy_hidden;
  TrainProtocol protocol;
  std::uint64_t seed = 0;

  void validate() const {
    if (env_name.empty()) throw ConfigError("BcConfig: env_name is required");
    protocol.adam.validate();
  }
};

struct BcRunRecord {
  BcConfig config;
  Policy policy;
  double policy_val_loss = 0.0;
};

inline BcRunRecord run_bc(const Env& env, const ActionfulDemoSet& demos, const BcConfig& cfg) {
  cfg.validate();
  demos.validate();
  if (demos.env_name != env.name())
    throw ConfigError("run_bc: demo set was recorded on '" + demos.env_name + "'");

  Rng rng_init(derive_seed(cfg.seed, 1));
  Rng rng_train(derive_seed(cfg.seed, 3));

  BcRunRecord rec;
  rec.config = cfg;
  rec.policy = Policy::create(env, cfg.policy_hidden, rng_init);
  const TrainReport rep =
      fit_policy(rec.policy, demos.trajectories, demos.actions, cfg.protocol, rng_train);
  rec.policy_val_loss = rep.best_val_loss;
  return rec;
}

}  // namespace bco
