#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bco/demos.hpp"
#include "bco/env.hpp"
#include "bco/inverse_dynamics.hpp"
#include "bco/training.hpp"

namespace bco {

// Likelihood model from full environment states to actions.
struct Policy {
  LikelihoodModel model;

  static Policy create(const Env& env, const std::vector<int>& hidden_widths, Rng& rng) {
    const auto& d = env.descriptor();
    MlpSpec spec;
    spec.input_dim = d.state_dim;
    for (int w : hidden_widths) spec.hidden.push_back(LayerSpec{w, Activation::LeakyRelu});
    return Policy{LikelihoodModel::create(spec, d.action_space, rng)};
  }

  bool trained() const { return model.trained; }

  Action act(const State& s) const {
    if (!model.trained) throw StateError("Policy: act before any fit");
    return model.mode_action(s);
  }

  Action act_stochastic(const State& s, Rng& rng) const {
    if (!model.trained) throw StateError("Policy: act before any fit");
    return model.sample_action(s, rng);
  }

  // Adapter for data collection. Sampling keeps exploration alive when the
  // policy itself gathers the transitions.
  Actor actor(bool sample) const {
    if (sample)
      return [this](const State& s, Rng& rng) { return act_stochastic(s, rng); };
    return [this](const State& s, Rng&) { return act(s); };
  }
};

// Supervised fit of the policy on (state, action) pairs taken from the
// demonstration trajectories. The same routine serves both inferred and
// ground-truth action labels; it never touches an environment.
inline TrainReport fit_policy(Policy& policy, const std::vector<StateTrajectory>& trajectories,
                              const std::vector<std::vector<Action>>& actions,
                              const TrainProtocol& protocol, Rng& rng) {
  if (trajectories.size() != actions.size())
    throw InputError("fit_policy: actions do not run parallel to trajectories");
  LabeledDataset data;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (trajectories[i].size() != actions[i].size() + 1)
      throw InputError("fit_policy: trajectory needs one more state than actions");
    for (std::size_t t = 0; t < actions[i].size(); ++t) {
      data.inputs.push_back(trajectories[i][t]);
      data.targets.push_back(actions[i][t]);
    }
  }
  if (data.inputs.empty()) throw InputError("fit_policy: no labeled transitions");
  ensure_splittable(data);
  split_70_30(data, rng);
  return early_stop_train(policy.model, data, protocol, rng);
}

struct EvalResult {
  double mean_return = 0.0;
  double stderr_return = 0.0;
  std::vector<double> returns;
};

// Greedy rollouts; episodes end at a terminal state or the horizon.
inline double rollout_return(const Env& env, const Policy& policy, Rng& rng) {
  State s = env.reset(rng);
  double total = 0.0;
  for (int t = 0; t < env.descriptor().max_episode_steps; ++t) {
    StepResult r = env.step(s, policy.act(s));
    total += r.reward;
    if (r.done) break;
    s = std::move(r.next_state);
  }
  return total;
}

inline EvalResult evaluate_policy(const Env& env, const Policy& policy, int n_episodes,
                                  Rng& rng) {
  if (n_episodes <= 0) throw InputError("evaluate_policy: need n_episodes > 0");
  EvalResult out;
  out.returns.reserve(n_episodes);
  for (int e = 0; e < n_episodes; ++e) out.returns.push_back(rollout_return(env, policy, rng));
  double sum = 0.0;
  for (double r : out.returns) sum += r;
  out.mean_return = sum / n_episodes;
  double ss = 0.0;
  for (double r : out.returns) ss += (r - out.mean_return) * (r - out.mean_return);
  if (n_episodes > 1)
    out.stderr_return = std::sqrt(ss / (n_episodes - 1)) / std::sqrt(double(n_episodes));
  return out;
}

}  // namespace bco
