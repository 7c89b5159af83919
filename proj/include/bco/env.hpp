#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bco/errors.hpp"
#include "bco/rng.hpp"

namespace bco {

using State = std::vector<double>;

// Discrete actions are an index, continuous actions a bounded vector.
using Action = std::variant<int, std::vector<double>>;

inline bool is_discrete_action(const Action& a) { return std::holds_alternative<int>(a); }
inline int discrete(const Action& a) { return std::get<int>(a); }
inline const std::vector<double>& box(const Action& a) {
  return std::get<std::vector<double>>(a);
}

struct ActionSpace {
  enum class Kind { Discrete, Continuous };
  Kind kind = Kind::Discrete;
  int n = 0;                  // discrete: number of actions
  std::vector<double> lower;  // continuous: per-dimension bounds
  std::vector<double> upper;

  static ActionSpace discrete(int n_actions) {
    ActionSpace s;
    s.kind = Kind::Discrete;
    s.n = n_actions;
    return s;
  }
  static ActionSpace continuous(std::vector<double> lo, std::vector<double> hi) {
    ActionSpace s;
    s.kind = Kind::Continuous;
    s.lower = std::move(lo);
    s.upper = std::move(hi);
    return s;
  }

  bool is_discrete() const { return kind == Kind::Discrete; }
  int dim() const { return is_discrete() ? n : static_cast<int>(lower.size()); }

  void check(const Action& a) const {
    if (is_discrete()) {
      if (!is_discrete_action(a)) throw InputError("action: expected a discrete action");
      const int i = bco::discrete(a);
      if (i < 0 || i >= n) throw InputError("action: discrete index out of range");
    } else {
      if (is_discrete_action(a)) throw InputError("action: expected a continuous action");
      const auto& v = box(a);
      if (static_cast<int>(v.size()) != dim())
        throw InputError("action: continuous dimension mismatch");
      for (std::size_t d = 0; d < v.size(); ++d)
        if (v[d] < lower[d] || v[d] > upper[d])
          throw InputError("action: value outside bounds");
    }
  }

  Action clip(const Action& a) const {
    if (is_discrete()) return a;
    std::vector<double> v = box(a);
    for (std::size_t d = 0; d < v.size(); ++d) {
      if (v[d] < lower[d]) v[d] = lower[d];
      if (v[d] > upper[d]) v[d] = upper[d];
    }
    return v;
  }
};

struct StepResult {
  State next_state;
  double reward = 0.0;
  bool done = false;
};

struct EnvDescriptor {
  int state_dim = 0;
  std::vector<int> agent_state_indices;  // order-preserving subset of [0, state_dim)
  ActionSpace action_space;
  int max_episode_steps = 0;
};

// One recorded environment step. Transitions never span a reset.
struct Transition {
  State state;
  Action action;
  State next_state;
  std::int64_t episode_id = 0;
};

// Deterministic-step simulation environment. All mutable episode state lives
// in the state vector handed back and forth, so instances are immutable and
// safe to share between threads.
class Env {
 public:
  virtual ~Env() = default;
  virtual std::string name() const = 0;
  virtual const EnvDescriptor& descriptor() const = 0;
  virtual State reset(Rng& rng) const = 0;
  virtual StepResult step(const State& state, const Action& action) const = 0;
};

// Agent-specific part of a state, per the descriptor's index set.
inline State agent_state(const Env& env, const State& state) {
  const auto& d = env.descriptor();
  if (static_cast<int>(state.size()) != d.state_dim)
    throw InputError("agent_state: state length does not match descriptor");
  State out;
  out.reserve(d.agent_state_indices.size());
  for (int i : d.agent_state_indices) out.push_back(state[i]);
  return out;
}

// Forwarding wrapper that counts every step() call. Used to prove interaction
// budgets: the driver routes all data collection through one of these while
// evaluation rollouts use separate, uncounted instances.
class StepCountingEnv : public Env {
 public:
  explicit StepCountingEnv(const Env& inner) : inner_(inner) {}

  std::string name() const override { return inner_.name(); }
  const EnvDescriptor& descriptor() const override { return inner_.descriptor(); }
  State reset(Rng& rng) const override { return inner_.reset(rng); }
  StepResult step(const State& state, const Action& action) const override {
    ++steps_;
    return inner_.step(state, action);
  }

  std::int64_t steps() const { return steps_; }
  void reset_counter() { steps_ = 0; }

 private:
  const Env& inner_;
  mutable std::int64_t steps_ = 0;
};

}  // namespace bco
