#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bco/env.hpp"
#include "bco/losses.hpp"
#include "bco/mlp.hpp"

namespace bco {

// Feed-forward network plus a distribution head over an action space.
// Discrete spaces get a softmax over the network outputs; continuous spaces
// read the outputs as per-dimension Gaussian means with one free log-std
// parameter per dimension that never depends on the input.
//
// Inputs are standardized by a per-feature affine map frozen at the first
// fit, so later refits keep the parameters meaningful.
struct LikelihoodModel {
  MlpSpec spec;
  MlpParams params;
  ActionSpace space;
  std::vector<double> log_std;  // continuous head only
  std::vector<double> input_shift;
  std::vector<double> input_scale;
  bool trained = false;

  static LikelihoodModel create(const MlpSpec& spec, const ActionSpace& space, Rng& rng) {
    LikelihoodModel m;
    m.spec = spec;
    m.spec.output_dim = space.is_discrete() ? space.n : space.dim();
    if (m.spec.output_dim != spec.output_dim && spec.output_dim != 0)
      throw ConfigError("LikelihoodModel: spec output_dim conflicts with action space");
    m.params = init_mlp_params(m.spec, rng);
    m.space = space;
    if (!space.is_discrete()) m.log_std.assign(space.dim(), 0.0);
    m.input_shift.assign(m.spec.input_dim, 0.0);
    m.input_scale.assign(m.spec.input_dim, 1.0);
    return m;
  }

  std::vector<double> standardize(const std::vector<double>& x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      z[i] = (x[i] - input_shift[i]) * input_scale[i];
    return z;
  }

  // Raw network outputs: logits (discrete) or means (continuous).
  std::vector<double> outputs(const std::vector<double>& input) const {
    return forward(params, spec, standardize(input));
  }

  std::vector<double> stds() const {
    std::vector<double> s(log_std.size());
    for (std::size_t d = 0; d < s.size(); ++d) s[d] = std::exp(log_std[d]);
    return s;
  }

  // Action probabilities for discrete heads.
  std::vector<double> action_probs(const std::vector<double>& input) const {
    if (!space.is_discrete())
      throw StateError("action_probs: continuous head has no probability vector");
    return softmax_probs(outputs(input));
  }

  // Maximum-likelihood action: argmax logit (ties to the lowest index) for
  // discrete heads, the mean clipped to bounds for continuous heads.
  Action mode_action(const std::vector<double>& input) const {
    const auto out = outputs(input);
    if (space.is_discrete()) {
      int best = 0;
      for (int i = 1; i < static_cast<int>(out.size()); ++i)
        if (out[i] > out[best]) best = i;
      return best;
    }
    return space.clip(Action(out));
  }

  Action sample_action(const std::vector<double>& input, Rng& rng) const {
    const auto out = outputs(input);
    if (space.is_discrete()) {
      const auto p = softmax_probs(out);
      double u = rng.uniform01();
      for (int i = 0; i < static_cast<int>(p.size()); ++i) {
        u -= p[i];
        if (u < 0.0) return i;
      }
      return static_cast<int>(p.size()) - 1;
    }
    std::vector<double> a(out.size());
    for (std::size_t d = 0; d < out.size(); ++d)
      a[d] = rng.normal(out[d], std::exp(log_std[d]));
    return space.clip(Action(std::move(a)));
  }
};

// Gradients of one example's negative log-likelihood.
struct ModelGrads {
  MlpGrads net;
  std::vector<double> log_std;
  double loss = 0.0;
};

inline double model_nll(const LikelihoodModel& m, const std::vector<double>& input,
                        const Action& target) {
  const auto out = m.outputs(input);
  if (m.space.is_discrete()) return softmax_nll(out, discrete(target)).loss;
  return gaussian_nll(out, m.log_std, box(target)).loss;
}

inline ModelGrads model_nll_grad(const LikelihoodModel& m, const std::vector<double>& input,
                                 const Action& target) {
  const auto z = m.standardize(input);
  const auto out = forward(m.params, m.spec, z);
  ModelGrads g;
  if (m.space.is_discrete()) {
    const auto nll = softmax_nll(out, discrete(target));
    g.loss = nll.loss;
    g.net = backward(m.params, m.spec, z, nll.logit_grad);
  } else {
    const auto nll = gaussian_nll(out, m.log_std, box(target));
    g.loss = nll.loss;
    g.net = backward(m.params, m.spec, z, nll.mean_grad);
    g.log_std = nll.log_std_grad;
  }
  return g;
}

// Flat parameter vector: network weights and biases, then log-stds.
inline std::vector<double> flatten_model(const LikelihoodModel& m) {
  std::vector<double> flat = flatten_params(m.params);
  flat.insert(flat.end(), m.log_std.begin(), m.log_std.end());
  return flat;
}

inline void unflatten_model(const std::vector<double>& flat, LikelihoodModel& m) {
  unflatten_params(flat, m.params);
  const std::size_t off = flat.size() - m.log_std.size();
  std::copy(flat.begin() + off, flat.end(), m.log_std.begin());
}

inline std::vector<double> flatten_model_grads(const LikelihoodModel& m, const ModelGrads& g) {
  std::vector<double> flat = flatten_params(MlpParams{g.net.weights, g.net.biases});
  if (!m.log_std.empty()) {
    if (g.log_std.empty())
      flat.insert(flat.end(), m.log_std.size(), 0.0);
    else
      flat.insert(flat.end(), g.log_std.begin(), g.log_std.end());
  }
  return flat;
}

}  // namespace bco
