#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bco/inverse_dynamics.hpp"
#include "bco/policy.hpp"

namespace bco {

// Settings for one imitation-from-observation run. alpha scales the
// post-demonstration interaction budget: every improvement round may take
// exactly round(alpha * pre_interactions) further environment steps, so
// alpha = 0 grants no interaction beyond the pre-demonstration phase.
struct BcoConfig {
  std::string env_name;
  double alpha = 0.0;
  std::int64_t pre_interactions = 0;
  int max_iterations = 50;  // improvement rounds after the initial fit
  double improvement_tolerance = 0.01;
  int improvement_patience = 1;  // rounds without a new best before stopping
  int probe_episodes = 100;
  bool sample_during_collection = true;
  std::vector<int> model_hidden;
  std::vector<int> policy_hidden;
  TrainProtocol protocol;
  std::uint64_t seed = 0;

  // Optional reference returns for reporting on a normalized scale where the
  // random behavior scores 0 and the demonstrator scores 1.
  double random_return = std::numeric_limits<double>::quiet_NaN();
  double expert_return = std::numeric_limits<double>::quiet_NaN();

  bool has_baselines() const {
    return std::isfinite(random_return) && std::isfinite(expert_return) &&
           expert_return > random_return;
  }

  double scaled(double raw) const {
    if (!has_baselines()) return std::numeric_limits<double>::quiet_NaN();
    return (raw - random_return) / (expert_return - random_return);
  }

  void validate() const {
    if (env_name.empty()) throw ConfigError("BcoConfig: env_name is required");
    if (alpha < 0.0) throw ConfigError("BcoConfig: alpha must be >= 0");
    if (pre_interactions <= 0) throw ConfigError("BcoConfig: pre_interactions must be > 0");
    if (max_iterations < 0) throw ConfigError("BcoConfig: max_iterations must be >= 0");
    if (improvement_patience < 1) throw ConfigError("BcoConfig: patience must be >= 1");
    if (probe_episodes <= 0) throw ConfigError("BcoConfig: probe_episodes must be > 0");
    protocol.adam.validate();
  }
};

// Post-demonstration steps granted per improvement round.
inline std::int64_t post_steps_per_iteration(double alpha, std::int64_t pre_interactions) {
  return static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(pre_interactions)));
}

struct BcoIteration {
  int iteration = 0;                       // 0 is the pre-demonstration fit
  std::int64_t collected_steps = 0;        // environment steps taken this round
  std::int64_t post_interactions_cum = 0;  // total steps after the pre phase
  double model_val_loss = 0.0;
  double policy_val_loss = 0.0;
  double probe_mean = 0.0;
  double probe_stderr = 0.0;
  double probe_scaled = 0.0;  // NaN without baselines
};

struct BcoRunRecord {
  BcoConfig config;
  std::vector<BcoIteration> iterations;
  InverseModel inverse_model;  // state after the last fit
  Policy policy;               // best probe performance across rounds
  Policy final_policy;         // state after the last fit
  int best_iteration = 0;
  std::int64_t pre_interactions = 0;
  std::int64_t post_interactions_cum = 0;
  std::int64_t counted_env_steps = 0;  // audited total across all collection
};

// Probe metric a round is judged by: scaled return when baselines are
// configured, raw mean return otherwise.
inline double probe_metric(const BcoConfig& cfg, const BcoIteration& it) {
  return cfg.has_baselines() ? it.probe_scaled : it.probe_mean;
}

// Continue improving? True when the newest round beat every earlier round by
// more than the tolerance and the round budget is not exhausted.
inline bool improvement_criterion(const BcoRunRecord& rec) {
  if (rec.iterations.empty()) throw InputError("improvement_criterion: empty record");
  const int completed_post_rounds = static_cast<int>(rec.iterations.size()) - 1;
  if (completed_post_rounds >= rec.config.max_iterations) return false;
  const double latest = probe_metric(rec.config, rec.iterations.back());
  double best_prior = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < rec.iterations.size(); ++i)
    best_prior = std::max(best_prior, probe_metric(rec.config, rec.iterations[i]));
  return latest > best_prior + rec.config.improvement_tolerance;
}

// Imitation from observation under an interaction budget.
//
// Round 0 collects pre_interactions steps of self-experience with uniformly
// random actions, fits the inverse model on it, labels the demonstrations
// with maximum-likelihood actions, and clones a policy from the labels.
// Each later round collects round(alpha * pre_interactions) steps with the
// current policy, refits on all accumulated experience, relabels, and
// reclones. Rounds continue while probe performance keeps setting new bests
// (within patience) up to max_iterations.
//
// All learning interaction flows through an audited step counter. Probe
// rollouts run on the raw environment and never touch the counted budget.
inline BcoRunRecord run_bco(const Env& env, const DemoSet& demos, const BcoConfig& cfg) {
  cfg.validate();
  demos.validate();
  if (demos.env_name != env.name())
    throw ConfigError("run_bco: demo set was recorded on '" + demos.env_name + "'");
  if (demos.transition_count() == 0) throw InputError("run_bco: demo set has no transitions");

  Rng rng_init(derive_seed(cfg.seed, 1));
  Rng rng_collect(derive_seed(cfg.seed, 2));
  Rng rng_train(derive_seed(cfg.seed, 3));
  Rng rng_probe(derive_seed(cfg.seed, 4));

  BcoRunRecord rec;
  rec.config = cfg;
  rec.inverse_model = InverseModel::create(env, cfg.model_hidden, rng_init);
  Policy policy = Policy::create(env, cfg.policy_hidden, rng_init);

  StepCountingEnv counted(env);
  InteractionBuffer buffer;

  const std::int64_t post_n = post_steps_per_iteration(cfg.alpha, cfg.pre_interactions);
  double best_metric = -std::numeric_limits<double>::infinity();
  int rounds_without_improvement = 0;

  for (int round = 0; round <= cfg.max_iterations; ++round) {
    const std::int64_t want = round == 0 ? cfg.pre_interactions : post_n;
    const Actor actor = round == 0
                            ? uniform_random_actor(env.descriptor().action_space)
                            : policy.actor(cfg.sample_during_collection);
    const std::int64_t before = counted.steps();
    collect_interactions(counted, actor, want, buffer, rng_collect);
    const std::int64_t taken = counted.steps() - before;
    if (taken != want) throw StateError("run_bco: collection step audit mismatch");

    const TrainReport model_rep =
        fit_inverse_model(rec.inverse_model, buffer, cfg.protocol, rng_train);
    const auto labels = infer_actions(rec.inverse_model, env, demos);
    const TrainReport policy_rep =
        fit_policy(policy, demos.trajectories, labels, cfg.protocol, rng_train);

    const EvalResult probe = evaluate_policy(env, policy, cfg.probe_episodes, rng_probe);

    BcoIteration it;
    it.iteration = round;
    it.collected_steps = taken;
    it.post_interactions_cum = round == 0 ? 0 : rec.post_interactions_cum + taken;
    it.model_val_loss = model_rep.best_val_loss;
    it.policy_val_loss = policy_rep.best_val_loss;
    it.probe_mean = probe.mean_return;
    it.probe_stderr = probe.stderr_return;
    it.probe_scaled = cfg.scaled(probe.mean_return);
    rec.iterations.push_back(it);
    if (round == 0)
      rec.pre_interactions = taken;
    else
      rec.post_interactions_cum += taken;

    const double metric = probe_metric(cfg, it);
    if (round == 0 || metric > best_metric) {
      best_metric = metric;
      rec.best_iteration = round;
      rec.policy = policy;
    }

    if (post_n == 0) break;  // no post-demonstration budget to spend
    if (round > 0) {
      if (improvement_criterion(rec)) {
        rounds_without_improvement = 0;
      } else {
        ++rounds_without_improvement;
        if (rounds_without_improvement >= cfg.improvement_patience) break;
      }
    }
  }

  rec.final_policy = policy;
  rec.counted_env_steps = counted.steps();
  if (rec.counted_env_steps != rec.pre_interactions + rec.post_interactions_cum)
    throw StateError("run_bco: interaction accounting mismatch");
  return rec;
}

}  // namespace bco
