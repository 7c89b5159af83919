#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "bco/adam.hpp"
#include "bco/model.hpp"

namespace bco {

// Supervised (input, action) pairs with a train/validation index split.
struct LabeledDataset {
  std::vector<std::vector<double>> inputs;
  std::vector<Action> targets;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;

  std::size_t size() const { return inputs.size(); }
  bool has_split() const { return !train_indices.empty() && !val_indices.empty(); }
};

// Random disjoint split with |train| = round(0.7 n), both sides kept
// nonempty.
inline void split_70_30(LabeledDataset& dataset, Rng& rng) {
  const std::size_t n = dataset.size();
  if (n < 2) throw InputError("split_70_30: need at least 2 examples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  std::size_t n_train = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
  n_train = std::max<std::size_t>(1, std::min(n_train, n - 1));
  dataset.train_indices.assign(order.begin(), order.begin() + n_train);
  dataset.val_indices.assign(order.begin() + n_train, order.end());
}

// A lone example is duplicated so the split can put a copy on each side;
// fitting a degenerate one-example dataset is legal, splitting it is not.
inline void ensure_splittable(LabeledDataset& dataset) {
  if (dataset.size() == 1) {
    dataset.inputs.push_back(dataset.inputs[0]);
    dataset.targets.push_back(dataset.targets[0]);
  }
}

struct TrainProtocol {
  AdamConfig adam;
  int batch_size = 32;
  int max_epochs = 500;
  int patience = 10;
  bool record_train_curve = false;  // extra per-epoch pass, diagnostics only
};

struct TrainReport {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<double> train_curve;  // mean train NLL after each epoch
  std::vector<double> val_curve;    // mean validation NLL after each epoch
};

inline double mean_nll(const LikelihoodModel& m, const LabeledDataset& data,
                       const std::vector<std::size_t>& indices) {
  double total = 0.0;
  for (std::size_t i : indices) total += model_nll(m, data.inputs[i], data.targets[i]);
  return total / static_cast<double>(indices.size());
}

// Freeze the per-feature standardizer from the training split. Only done on
// a model's first fit; refits keep the original map so warm-started
// parameters stay valid.
inline void fit_standardizer(LikelihoodModel& m, const LabeledDataset& data) {
  const int dim = m.spec.input_dim;
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  const double n = static_cast<double>(data.train_indices.size());
  for (std::size_t i : data.train_indices)
    for (int d = 0; d < dim; ++d) mean[d] += data.inputs[i][d];
  for (double& v : mean) v /= n;
  for (std::size_t i : data.train_indices)
    for (int d = 0; d < dim; ++d) {
      const double diff = data.inputs[i][d] - mean[d];
      var[d] += diff * diff;
    }
  for (int d = 0; d < dim; ++d) {
    const double std = std::sqrt(var[d] / n);
    m.input_shift[d] = mean[d];
    m.input_scale[d] = std > 1e-12 ? 1.0 / std : 1.0;
  }
}

// Mini-batch Adam on the train split with early stopping on the validation
// split: stop once validation loss has not improved for `patience`
// consecutive epochs, then restore the best-validation parameters. The
// validation examples never contribute gradients.
inline TrainReport early_stop_train(LikelihoodModel& model, const LabeledDataset& data,
                                    const TrainProtocol& protocol, Rng& rng) {
  if (!data.has_split()) throw InputError("early_stop_train: dataset has no split");
  if (!model.trained) fit_standardizer(model, data);

  std::vector<double> flat = flatten_model(model);
  AdamState adam(flat.size(), protocol.adam);

  TrainReport report;
  std::vector<double> best = flat;
  int epochs_since_best = 0;
  std::vector<std::size_t> order = data.train_indices;

  for (int epoch = 1; epoch <= protocol.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(protocol.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(protocol.batch_size));
      std::vector<double> batch_grad(flat.size(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto g = model_nll_grad(model, data.inputs[i], data.targets[i]);
        const auto gf = flatten_model_grads(model, g);
        for (std::size_t p = 0; p < flat.size(); ++p) batch_grad[p] += gf[p];
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : batch_grad) g *= inv;  // mean, not sum
      adam_step(adam, flat, batch_grad);
      unflatten_model(flat, model);
    }

    const double val_loss = mean_nll(model, data, data.val_indices);
    if (!std::isfinite(val_loss))
      throw StateError("early_stop_train: validation loss diverged");
    if (protocol.record_train_curve)
      report.train_curve.push_back(mean_nll(model, data, data.train_indices));
    report.val_curve.push_back(val_loss);
    report.epochs_run = epoch;
    if (val_loss < report.best_val_loss) {
      report.best_val_loss = val_loss;
      report.best_epoch = epoch;
      best = flat;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= protocol.patience) break;
    }
  }

  unflatten_model(best, model);
  model.trained = true;
  return report;
}

}  // namespace bco
