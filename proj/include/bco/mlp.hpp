#pragma once

#include <string>
#include <vector>

#include "bco/errors.hpp"
#include "bco/matrix.hpp"
#include "bco/rng.hpp"

namespace bco {

enum class Activation { LeakyRelu, Linear };

struct LayerSpec {
  int width = 0;
  Activation activation = Activation::LeakyRelu;
};

// Shape of a feed-forward network. Zero hidden layers denotes a plain linear
// model. The output layer is always linear; distribution heads interpret it.
struct MlpSpec {
  int input_dim = 0;
  std::vector<LayerSpec> hidden;
  int output_dim = 0;
  double lrelu_slope = 0.01;

  // Widths of every activation vector from input to output.
  std::vector<int> layer_dims() const {
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (const auto& h : hidden) dims.push_back(h.width);
    dims.push_back(output_dim);
    return dims;
  }

  int num_layers() const { return static_cast<int>(hidden.size()) + 1; }

  void validate() const {
    if (input_dim < 1 || output_dim < 1)
      throw ConfigError("MlpSpec: input_dim and output_dim must be >= 1");
    for (const auto& h : hidden)
      if (h.width < 1) throw ConfigError("MlpSpec: hidden widths must be >= 1");
  }
};

// One weight matrix and bias vector per layer, output layer included.
// weights[k] has shape (dims[k+1], dims[k]).
struct MlpParams {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  int parameter_count() const {
    int n = 0;
    for (const auto& w : weights) n += w.rows * w.cols;
    for (const auto& b : biases) n += static_cast<int>(b.size());
    return n;
  }
};

// Gradients mirror the parameter shapes; input_grad is the derivative of the
// scalar output.output_grad with respect to the network input.
struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input_grad;
};

inline double apply_activation(Activation act, double slope, double x) {
  if (act == Activation::Linear) return x;
  return x >= 0.0 ? x : slope * x;
}

inline double activation_derivative(Activation act, double slope, double x) {
  if (act == Activation::Linear) return 1.0;
  return x >= 0.0 ? 1.0 : slope;
}

// Glorot-style uniform init in +-sqrt(6/(fan_in+fan_out)), biases zero.
inline MlpParams init_mlp_params(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  const auto dims = spec.layer_dims();
  MlpParams params;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const int fan_in = dims[k];
    const int fan_out = dims[k + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (double& x : w.data) x = rng.uniform(-bound, bound);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(fan_out, 0.0);
  }
  return params;
}

inline void check_mlp_shapes(const MlpParams& params, const MlpSpec& spec) {
  const auto dims = spec.layer_dims();
  if (params.weights.size() != dims.size() - 1 || params.biases.size() != dims.size() - 1)
    throw ConfigError("MlpParams: layer count does not match spec");
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    if (params.weights[k].rows != dims[k + 1] || params.weights[k].cols != dims[k])
      throw ConfigError("MlpParams: weight shape mismatch at layer " + std::to_string(k));
    if (static_cast<int>(params.biases[k].size()) != dims[k + 1])
      throw ConfigError("MlpParams: bias length mismatch at layer " + std::to_string(k));
  }
}

// Pre-activation and activation values for every layer, reused by backward.
struct ForwardTrace {
  std::vector<std::vector<double>> pre;   // one per layer
  std::vector<std::vector<double>> post;  // post[0] is the input
};

inline std::vector<double> forward_traced(const MlpParams& params, const MlpSpec& spec,
                                          const std::vector<double>& input, ForwardTrace* trace) {
  check_mlp_shapes(params, spec);
  if (static_cast<int>(input.size()) != spec.input_dim)
    throw ConfigError("forward: input length does not match spec.input_dim");

  std::vector<double> x = input;
  if (trace) {
    trace->pre.clear();
    trace->post.clear();
    trace->post.push_back(x);
  }
  const int n_layers = spec.num_layers();
  for (int k = 0; k < n_layers; ++k) {
    std::vector<double> z = matvec(params.weights[k], x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += params.biases[k][i];
    const Activation act =
        k + 1 < n_layers ? spec.hidden[k].activation : Activation::Linear;
    if (trace) trace->pre.push_back(z);
    for (double& v : z) v = apply_activation(act, spec.lrelu_slope, v);
    if (trace) trace->post.push_back(z);
    x = std::move(z);
  }
  return x;
}

inline std::vector<double> forward(const MlpParams& params, const MlpSpec& spec,
                                   const std::vector<double>& input) {
  return forward_traced(params, spec, input, nullptr);
}

// Exact gradients of output.output_grad w.r.t. every parameter and the input.
inline MlpGrads backward(const MlpParams& params, const MlpSpec& spec,
                         const std::vector<double>& input,
                         const std::vector<double>& output_grad) {
  if (static_cast<int>(output_grad.size()) != spec.output_dim)
    throw ConfigError("backward: output_grad length does not match spec.output_dim");
  ForwardTrace trace;
  forward_traced(params, spec, input, &trace);

  MlpGrads grads;
  grads.weights.reserve(params.weights.size());
  grads.biases.reserve(params.biases.size());
  for (const auto& w : params.weights) grads.weights.emplace_back(w.rows, w.cols);
  for (const auto& b : params.biases) grads.biases.emplace_back(b.size(), 0.0);

  const int n_layers = spec.num_layers();
  std::vector<double> delta = output_grad;  // gradient w.r.t. layer pre-activation
  for (int k = n_layers - 1; k >= 0; --k) {
    const Activation act =
        k + 1 < n_layers ? spec.hidden[k].activation : Activation::Linear;
    for (std::size_t i = 0; i < delta.size(); ++i)
      delta[i] *= activation_derivative(act, spec.lrelu_slope, trace.pre[k][i]);
    add_outer(grads.weights[k], delta, trace.post[k]);
    for (std::size_t i = 0; i < delta.size(); ++i) grads.biases[k][i] += delta[i];
    delta = matvec_transposed(params.weights[k], delta);
  }
  grads.input_grad = std::move(delta);
  return grads;
}

// Flat-vector views used by the optimizer; layout is weights then biases,
// layer by layer.
inline std::vector<double> flatten_params(const MlpParams& params) {
  std::vector<double> flat;
  flat.reserve(params.parameter_count());
  for (const auto& w : params.weights) flat.insert(flat.end(), w.data.begin(), w.data.end());
  for (const auto& b : params.biases) flat.insert(flat.end(), b.begin(), b.end());
  return flat;
}

inline void unflatten_params(const std::vector<double>& flat, MlpParams& params) {
  std::size_t pos = 0;
  for (auto& w : params.weights) {
    std::copy(flat.begin() + pos, flat.begin() + pos + w.data.size(), w.data.begin());
    pos += w.data.size();
  }
  for (auto& b : params.biases) {
    std::copy(flat.begin() + pos, flat.begin() + pos + b.size(), b.begin());
    pos += b.size();
  }
}

inline void accumulate_grads(MlpGrads& acc, const MlpGrads& g) {
  for (std::size_t k = 0; k < acc.weights.size(); ++k) {
    for (std::size_t i = 0; i < acc.weights[k].data.size(); ++i)
      acc.weights[k].data[i] += g.weights[k].data[i];
    for (std::size_t i = 0; i < acc.biases[k].size(); ++i)
      acc.biases[k][i] += g.biases[k][i];
  }
}

inline void scale_grads(MlpGrads& g, double s) {
  for (auto& w : g.weights)
    for (double& x : w.data) x *= s;
  for (auto& b : g.biases)
    for (double& x : b) x *= s;
}

inline MlpGrads zero_grads_like(const MlpParams& params) {
  MlpGrads g;
  for (const auto& w : params.weights) g.weights.emplace_back(w.rows, w.cols);
  for (const auto& b : params.biases) g.biases.emplace_back(b.size(), 0.0);
  return g;
}

}  // namespace bco
