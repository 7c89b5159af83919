#pragma once

#include <cmath>
#include <vector>

#include "bco/errors.hpp"

namespace bco {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

struct SoftmaxNll {
  double loss = 0.0;
  std::vector<double> logit_grad;
};

// Negative log-likelihood of the indexed class under softmax(logits),
// stabilized by max subtraction. Gradient is softmax(logits) - one_hot.
inline SoftmaxNll softmax_nll(const std::vector<double>& logits, int action_index) {
  if (action_index < 0 || action_index >= static_cast<int>(logits.size()))
    throw InputError("softmax_nll: action index out of range");
  double max_logit = logits[0];
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  std::vector<double> expz(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    expz[i] = std::exp(logits[i] - max_logit);
    sum += expz[i];
  }
  SoftmaxNll out;
  out.loss = std::log(sum) - (logits[action_index] - max_logit);
  out.logit_grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out.logit_grad[i] = expz[i] / sum;
  out.logit_grad[action_index] -= 1.0;
  return out;
}

inline std::vector<double> softmax_probs(const std::vector<double>& logits) {
  double max_logit = logits[0];
  for (double l : logits) max_logit = std::max(max_logit, l);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - max_logit);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct GaussianNll {
  double loss = 0.0;
  std::vector<double> mean_grad;
  std::vector<double> log_std_grad;
};

// Diagonal Gaussian negative log-likelihood:
//   sum_d [ log sigma_d + 0.5*log(2*pi) + (a_d - mu_d)^2 / (2 sigma_d^2) ]
inline GaussianNll gaussian_nll(const std::vector<double>& mean,
                                const std::vector<double>& log_std,
                                const std::vector<double>& action) {
  if (mean.size() != log_std.size() || mean.size() != action.size())
    throw InputError("gaussian_nll: dimension mismatch");
  GaussianNll out;
  out.mean_grad.resize(mean.size());
  out.log_std_grad.resize(mean.size());
  for (std::size_t d = 0; d < mean.size(); ++d) {
    const double inv_var = std::exp(-2.0 * log_std[d]);
    const double diff = action[d] - mean[d];
    out.loss += log_std[d] + kHalfLog2Pi + 0.5 * diff * diff * inv_var;
    out.mean_grad[d] = -diff * inv_var;
    out.log_std_grad[d] = 1.0 - diff * diff * inv_var;
  }
  return out;
}

}  // namespace bco
