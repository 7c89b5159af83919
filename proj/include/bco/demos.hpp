#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bco/env.hpp"
#include "bco/environments.hpp"

namespace bco {

using StateTrajectory = std::vector<State>;

// State-only demonstrations: what an observer could record without access to
// the demonstrator's controls. Holds no action data by construction.
struct DemoSet {
  std::string env_name;
  std::vector<StateTrajectory> trajectories;

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& t : trajectories)
      if (t.size() > 1) n += t.size() - 1;
    return n;
  }

  void validate() const {
    for (const auto& t : trajectories)
      if (t.size() < 2) throw InputError("DemoSet: trajectory with fewer than two states");
  }
};

// Demonstrations with the ground-truth action for every transition, kept for
// diagnostics (for example scoring inferred actions). actions[i] runs
// parallel to trajectories[i] with one entry per transition.
struct ActionfulDemoSet {
  std::string env_name;
  std::vector<StateTrajectory> trajectories;
  std::vector<std::vector<Action>> actions;

  DemoSet strip() const { return DemoSet{env_name, trajectories}; }

  void validate() const {
    if (actions.size() != trajectories.size())
      throw InputError("ActionfulDemoSet: actions do not run parallel to trajectories");
    for (std::size_t i = 0; i < trajectories.size(); ++i)
      if (trajectories[i].size() != actions[i].size() + 1)
        throw InputError("ActionfulDemoSet: trajectory needs one more state than actions");
  }
};

using ExpertFn = std::function<Action(const State&)>;

// Deterministic hand-written controllers, one per environment. These stand in
// for the trained demonstrators; they only need to be clearly better than
// random play.
inline ExpertFn scripted_expert(const std::string& env_name) {
  if (env_name == "cartpole") {
    // Relay stabilizer over the full state. Weighting every component keeps
    // short demonstration snippets informative about all four of them.
    return [](const State& s) -> Action {
      return 0.7 * s[0] + s[1] + 2.0 * s[2] + s[3] > 0.0 ? 1 : 0;
    };
  }
  if (env_name == "mountaincar") {
    // Bang-bang energy pumping: always push along the current velocity.
    return [](const State& s) -> Action { return s[1] < 0.0 ? 0 : 2; };
  }
  if (env_name == "reacher2d") {
    return [](const State& s) -> Action {
      const double q1 = std::atan2(s[1], s[0]);
      const double q12 = q1 + std::atan2(s[3], s[2]);
      const double ex = s[8] - s[6];
      const double ey = s[9] - s[7];
      // Jacobian-transpose reach with joint damping.
      const double l1 = Reacher2DEnv::kLink1, l2 = Reacher2DEnv::kLink2;
      const double j11 = -l1 * std::sin(q1) - l2 * std::sin(q12);
      const double j12 = -l2 * std::sin(q12);
      const double j21 = l1 * std::cos(q1) + l2 * std::cos(q12);
      const double j22 = l2 * std::cos(q12);
      const double kp = 4.0, kd = 0.5;
      std::vector<double> tau{kp * (j11 * ex + j21 * ey) - kd * s[4],
                              kp * (j12 * ex + j22 * ey) - kd * s[5]};
      for (double& t : tau) t = std::clamp(t, -1.0, 1.0);
      return tau;
    };
  }
  if (env_name == "chainworld") {
    return [](const State&) -> Action { return 1; };
  }
  throw ConfigError("scripted_expert: unknown environment '" + env_name + "'");
}

// Roll out an expert and keep at most `transition_cap` transitions per
// trajectory (cap <= 0 keeps whole episodes). Trajectories store full states;
// consumers project out agent-specific features as needed.
inline ActionfulDemoSet record_actionful_demos(const Env& env, const ExpertFn& expert,
                                               int n_trajectories, int transition_cap,
                                               Rng& rng) {
  if (n_trajectories <= 0) throw InputError("record_actionful_demos: need n_trajectories > 0");
  ActionfulDemoSet set;
  set.env_name = env.name();
  const int horizon = env.descriptor().max_episode_steps;
  for (int i = 0; i < n_trajectories; ++i) {
    StateTrajectory traj;
    std::vector<Action> acts;
    State s = env.reset(rng);
    traj.push_back(s);
    for (int t = 0; t < horizon; ++t) {
      if (transition_cap > 0 && static_cast<int>(acts.size()) >= transition_cap) break;
      Action a = expert(s);
      StepResult r = env.step(s, a);
      acts.push_back(std::move(a));
      traj.push_back(r.next_state);
      s = std::move(r.next_state);
      if (r.done) break;
    }
    set.trajectories.push_back(std::move(traj));
    set.actions.push_back(std::move(acts));
  }
  set.validate();
  return set;
}

inline DemoSet record_demos(const Env& env, const ExpertFn& expert, int n_trajectories,
                            int transition_cap, Rng& rng) {
  return record_actionful_demos(env, expert, n_trajectories, transition_cap, rng).strip();
}

}  // namespace bco
