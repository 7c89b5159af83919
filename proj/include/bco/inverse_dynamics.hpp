#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "bco/demos.hpp"
#include "bco/env.hpp"
#include "bco/training.hpp"

namespace bco {

// Behavior used to gather transitions; receives the full state.
using Actor = std::function<Action(const State&, Rng&)>;

inline Actor uniform_random_actor(const ActionSpace& space) {
  if (space.is_discrete()) {
    const int n = space.n;
    return [n](const State&, Rng& rng) -> Action { return rng.uniform_int(n); };
  }
  const auto lo = space.lower, hi = space.upper;
  return [lo, hi](const State&, Rng& rng) -> Action {
    std::vector<double> a(lo.size());
    for (std::size_t d = 0; d < a.size(); ++d) a[d] = rng.uniform(lo[d], hi[d]);
    return a;
  };
}

// Self-experience for inverse-dynamics learning. Each entry pairs the
// agent-specific features of consecutive states with the action taken
// between them; pairs never span an episode reset. interaction_count tracks
// every environment step spent filling the buffer.
struct InteractionBuffer {
  std::vector<std::vector<double>> inputs;  // concat(agent s, agent s')
  std::vector<Action> actions;
  std::int64_t interaction_count = 0;

  std::size_t size() const { return inputs.size(); }
  bool empty() const { return inputs.empty(); }
};

inline std::vector<double> pair_features(const Env& env, const State& s, const State& next) {
  std::vector<double> x = agent_state(env, s);
  const std::vector<double> y = agent_state(env, next);
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

// Run the actor for exactly n_steps environment steps, resetting on episode
// end, and append one (pair, action) example per step.
inline void collect_interactions(const Env& env, const Actor& actor, std::int64_t n_steps,
                                 InteractionBuffer& buffer, Rng& rng) {
  if (n_steps < 0) throw InputError("collect_interactions: n_steps must be >= 0");
  const int horizon = env.descriptor().max_episode_steps;
  State s;
  int t_in_episode = horizon;  // force an initial reset
  for (std::int64_t i = 0; i < n_steps; ++i) {
    if (t_in_episode >= horizon) {
      s = env.reset(rng);
      t_in_episode = 0;
    }
    Action a = actor(s, rng);
    StepResult r = env.step(s, a);
    buffer.inputs.push_back(pair_features(env, s, r.next_state));
    buffer.actions.push_back(std::move(a));
    ++buffer.interaction_count;
    ++t_in_episode;
    if (r.done) t_in_episode = horizon;
    s = std::move(r.next_state);
  }
}

// Likelihood model over (state, next state) pairs. Predicts the action that
// caused an observed transition.
struct InverseModel {
  LikelihoodModel model;

  static InverseModel create(const Env& env, const std::vector<int>& hidden_widths, Rng& rng) {
    const auto& d = env.descriptor();
    MlpSpec spec;
    spec.input_dim = 2 * static_cast<int>(d.agent_state_indices.size());
    for (int w : hidden_widths) spec.hidden.push_back(LayerSpec{w, Activation::LeakyRelu});
    return InverseModel{LikelihoodModel::create(spec, d.action_space, rng)};
  }

  bool trained() const { return model.trained; }

  Action predict(const Env& env, const State& s, const State& next) const {
    if (!model.trained) throw StateError("InverseModel: predict before any fit");
    return model.mode_action(pair_features(env, s, next));
  }
};

inline TrainReport fit_inverse_model(InverseModel& m, const InteractionBuffer& buffer,
                                     const TrainProtocol& protocol, Rng& rng) {
  if (buffer.empty()) throw InputError("fit_inverse_model: empty interaction buffer");
  LabeledDataset data;
  data.inputs = buffer.inputs;
  data.targets = buffer.actions;
  ensure_splittable(data);
  split_70_30(data, rng);
  TrainReport report = early_stop_train(m.model, data, protocol, rng);
  return report;
}

// Maximum-likelihood action for every transition in the demonstrations,
// grouped per trajectory.
inline std::vector<std::vector<Action>> infer_actions(const InverseModel& m, const Env& env,
                                                      const DemoSet& demos) {
  if (!m.trained()) throw StateError("infer_actions: inverse model has not been fitted");
  demos.validate();
  std::vector<std::vector<Action>> inferred;
  inferred.reserve(demos.trajectories.size());
  for (const auto& traj : demos.trajectories) {
    std::vector<Action> acts;
    acts.reserve(traj.size() - 1);
    for (std::size_t t = 0; t + 1 < traj.size(); ++t)
      acts.push_back(m.predict(env, traj[t], traj[t + 1]));
    inferred.push_back(std::move(acts));
  }
  return inferred;
}

}  // namespace bco
