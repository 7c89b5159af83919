#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "bco/env.hpp"

namespace bco {

// Classic cart-pole balancing, Euler-integrated at dt = 0.02. Reward is +1
// per step; the episode ends when the pole tips past 12 degrees or the cart
// leaves +-2.4.
class CartPoleEnv : public Env {
 public:
  CartPoleEnv() {
    desc_.state_dim = 4;
    desc_.agent_state_indices = {0, 1, 2, 3};
    desc_.action_space = ActionSpace::discrete(2);
    desc_.max_episode_steps = 200;
  }

  std::string name() const override { return "cartpole"; }
  const EnvDescriptor& descriptor() const override { return desc_; }

  State reset(Rng& rng) const override {
    State s(4);
    for (double& x : s) x = rng.uniform(-0.05, 0.05);
    return s;
  }

  StepResult step(const State& state, const Action& action) const override {
    desc_.action_space.check(action);
    const double x = state[0], x_dot = state[1], theta = state[2], theta_dot = state[3];
    const double force = discrete(action) == 1 ? kForceMag : -kForceMag;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    StepResult r;
    r.next_state = {x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot,
                    theta_dot + kTau * theta_acc};
    r.reward = 1.0;
    r.done = std::abs(r.next_state[0]) > kXThreshold ||
             std::abs(r.next_state[2]) > kThetaThreshold;
    return r;
  }

 private:
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kTotalMass = kMassCart + kMassPole;
  static constexpr double kLength = 0.5;  // half the pole length
  static constexpr double kPoleMassLength = kMassPole * kLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXThreshold = 2.4;
  static constexpr double kThetaThreshold = 12.0 * M_PI / 180.0;

  EnvDescriptor desc_;
};

// Under-powered car in a valley. Actions {0: push left, 1: coast, 2: push
// right}; reward -1 per step until the car crests the right hill.
class MountainCarEnv : public Env {
 public:
  MountainCarEnv() {
    desc_.state_dim = 2;
    desc_.agent_state_indices = {0, 1};
    desc_.action_space = ActionSpace::discrete(3);
    desc_.max_episode_steps = 200;
  }

  std::string name() const override { return "mountaincar"; }
  const EnvDescriptor& descriptor() const override { return desc_; }

  State reset(Rng& rng) const override { return {rng.uniform(-0.6, -0.4), 0.0}; }

  StepResult step(const State& state, const Action& action) const override {
    desc_.action_space.check(action);
    double position = state[0], velocity = state[1];
    velocity += (discrete(action) - 1) * kForce - std::cos(3.0 * position) * kGravity;
    velocity = std::min(std::max(velocity, -kMaxSpeed), kMaxSpeed);
    position += velocity;
    position = std::min(std::max(position, kMinPosition), kMaxPosition);
    if (position <= kMinPosition && velocity < 0.0) velocity = 0.0;

    StepResult r;
    r.next_state = {position, velocity};
    r.reward = -1.0;
    r.done = position >= kGoalPosition;
    return r;
  }

 private:
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kGoalPosition = 0.5;

  EnvDescriptor desc_;
};

// Two-link planar arm with torque actions in [-1,1]^2 and a per-episode
// target. Joints are velocity-damped double integrators under Euler
// integration; reward is negative fingertip-to-target distance minus a small
// action penalty. State layout:
//   [cos q1, sin q1, cos q2, sin q2, qd1, qd2, tip_x, tip_y, target_x, target_y]
// The first eight features describe only the arm and form the agent-specific
// state; the last two are the task-specific target position.
class Reacher2DEnv : public Env {
 public:
  Reacher2DEnv() {
    desc_.state_dim = 10;
    desc_.agent_state_indices = {0, 1, 2, 3, 4, 5, 6, 7};
    desc_.action_space =
        ActionSpace::continuous({-1.0, -1.0}, {1.0, 1.0});
    desc_.max_episode_steps = 50;
  }

  std::string name() const override { return "reacher2d"; }
  const EnvDescriptor& descriptor() const override { return desc_; }

  State reset(Rng& rng) const override {
    const double q1 = rng.uniform(-M_PI, M_PI);
    const double q2 = rng.uniform(-M_PI, M_PI);
    const double target_angle = rng.uniform(-M_PI, M_PI);
    const double target_radius = rng.uniform(0.2, 0.9);
    return pack(q1, q2, 0.0, 0.0, target_radius * std::cos(target_angle),
                target_radius * std::sin(target_angle));
  }

  StepResult step(const State& state, const Action& action) const override {
    desc_.action_space.check(action);
    const auto& torque = box(action);
    const double q1 = std::atan2(state[1], state[0]);
    const double q2 = std::atan2(state[3], state[2]);
    double qd1 = state[4], qd2 = state[5];
    const double tx = state[8], ty = state[9];

    qd1 += kDt * (kGain * torque[0] - kDamping * qd1);
    qd2 += kDt * (kGain * torque[1] - kDamping * qd2);
    const double nq1 = q1 + kDt * qd1;
    const double nq2 = q2 + kDt * qd2;

    StepResult r;
    r.next_state = pack(nq1, nq2, qd1, qd2, tx, ty);
    const double dx = r.next_state[6] - tx;
    const double dy = r.next_state[7] - ty;
    r.reward = -std::sqrt(dx * dx + dy * dy) -
               0.01 * (torque[0] * torque[0] + torque[1] * torque[1]);
    r.done = false;  // episodes end only at the horizon
    return r;
  }

  static constexpr double kLink1 = 0.5;
  static constexpr double kLink2 = 0.5;
  static constexpr double kDt = 0.05;
  static constexpr double kGain = 8.0;
  static constexpr double kDamping = 2.0;

 private:
  static State pack(double q1, double q2, double qd1, double qd2, double tx, double ty) {
    const double tip_x = kLink1 * std::cos(q1) + kLink2 * std::cos(q1 + q2);
    const double tip_y = kLink1 * std::sin(q1) + kLink2 * std::sin(q1 + q2);
    return {std::cos(q1), std::sin(q1), std::cos(q2), std::sin(q2),
            qd1,          qd2,          tip_x,        tip_y,
            tx,           ty};
  }

  EnvDescriptor desc_;
};

// Five-state deterministic chain used as a brute-force oracle: the action is
// uniquely determined by any observed (state, next state) pair. Reward -1 per
// step; reaching the last state ends the episode.
class ChainWorldEnv : public Env {
 public:
  ChainWorldEnv() {
    desc_.state_dim = 1;
    desc_.agent_state_indices = {0};
    desc_.action_space = ActionSpace::discrete(2);
    desc_.max_episode_steps = 20;
  }

  std::string name() const override { return "chainworld"; }
  const EnvDescriptor& descriptor() const override { return desc_; }

  State reset(Rng&) const override { return {0.0}; }

  StepResult step(const State& state, const Action& action) const override {
    desc_.action_space.check(action);
    const int k = static_cast<int>(state[0]);
    const int next = discrete(action) == 1 ? std::min(k + 1, kLastState)
                                           : std::max(k - 1, 0);
    StepResult r;
    r.next_state = {static_cast<double>(next)};
    r.reward = -1.0;
    r.done = next == kLastState;
    return r;
  }

  static constexpr int kLastState = 4;

 private:
  EnvDescriptor desc_;
};

inline std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "mountaincar") return std::make_unique<MountainCarEnv>();
  if (name == "reacher2d") return std::make_unique<Reacher2DEnv>();
  if (name == "chainworld") return std::make_unique<ChainWorldEnv>();
  throw ConfigError("unknown environment: " + name);
}

}  // namespace bco
