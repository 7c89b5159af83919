#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "bco/errors.hpp"

namespace bco {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw ConfigError("AdamConfig: betas must be in [0, 1)");
    if (epsilon <= 0.0) throw ConfigError("AdamConfig: epsilon must be > 0");
  }
};

// Bias-corrected Adam over a flat parameter vector. Moments start at zero.
struct AdamState {
  AdamConfig config;
  std::int64_t step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;

  AdamState(std::size_t n, const AdamConfig& cfg)
      : config(cfg), first_moment(n, 0.0), second_moment(n, 0.0) {
    config.validate();
  }
};

inline void adam_step(AdamState& state, std::vector<double>& params,
                      const std::vector<double>& grads) {
  if (params.size() != state.first_moment.size() || grads.size() != params.size())
    throw ConfigError("adam_step: shape mismatch between state, params and grads");
  state.step_count += 1;
  const double b1 = state.config.beta1;
  const double b2 = state.config.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    const double g = grads[i];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double m_hat = m / corr1;
    const double v_hat = v / corr2;
    params[i] -= state.config.learning_rate * m_hat / (std::sqrt(v_hat) + state.config.epsilon);
  }
}

}  // namespace bco
