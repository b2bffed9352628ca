/*
 * Copyright (c) 2026, the opteq authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "opteq/mlp.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace opteq {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 2048;
  int max_epochs = 1000;
  int patience_epochs = 150;   ///< consecutive low-improvement epochs before stopping
  double min_delta = 1e-5;     ///< relative train-loss improvement threshold
  std::uint64_t shuffle_seed = 0;

  void validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("train: learning rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (patience_epochs < 1) throw std::invalid_argument("train: patience must be >= 1");
    if (min_delta < 0.0) throw std::invalid_argument("train: min_delta must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
      throw std::invalid_argument("train: Adam betas must lie in [0, 1)");
  }
};

struct EpochRecord {
  int epoch = 0;          // 1-based
  double train_mse = 0.0;
  double test_ber = std::numeric_limits<double>::quiet_NaN();
  double test_q_db = std::numeric_limits<double>::quiet_NaN();
};

template <typename Scalar>
struct AdamStateT {
  std::vector<MatrixX<Scalar>> m, v;
  long step = 0;
};

/// One Adam update.  With masks present, the gradients of masked weights
/// are zeroed before entering the moment estimates and the masks are
/// re-applied to the weights afterwards, so pruned positions stay exactly
/// zero no matter what momentum they accumulated before being pruned.
template <typename Scalar>
void adam_step(MlpModelT<Scalar>& model, AdamStateT<Scalar>& state,
               std::vector<MatrixX<Scalar>> grads, const TrainConfig& cfg) {
  if (grads.size() != model.weights.size())
    throw std::invalid_argument("adam_step: gradient count mismatch");
  if (state.m.empty()) {
    for (const auto& w : model.weights) {
      state.m.push_back(MatrixX<Scalar>::Zero(w.rows(), w.cols()));
      state.v.push_back(MatrixX<Scalar>::Zero(w.rows(), w.cols()));
    }
  }
  ++state.step;
  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  const Scalar corr1 = static_cast<Scalar>(1.0 - std::pow(cfg.beta1, state.step));
  const Scalar corr2 = static_cast<Scalar>(1.0 - std::pow(cfg.beta2, state.step));
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    MatrixX<Scalar>& g = grads[l];
    if (model.has_masks()) g = g.cwiseProduct(model.masks[l]);
    state.m[l] = b1 * state.m[l] + (Scalar(1) - b1) * g;
    state.v[l] = b2 * state.v[l] + (Scalar(1) - b2) * g.cwiseProduct(g);
    const auto m_hat = (state.m[l] / corr1).array();
    const auto v_hat = (state.v[l] / corr2).array();
    model.weights[l].array() -=
        static_cast<Scalar>(cfg.learning_rate) * m_hat / (v_hat.sqrt() + static_cast<Scalar>(cfg.epsilon));
    if (model.has_masks())
      model.weights[l] = model.weights[l].cwiseProduct(model.masks[l]);
  }
}

/// Forward pass over a dataset in evaluation-sized batches; returns MSE.
template <typename Scalar>
double evaluate_mse(const MlpModelT<Scalar>& model, const WindowedDatasetT<Scalar>& data) {
  return mse_loss(forward(model, data.inputs), data.targets);
}

struct TrainResult {
  std::vector<EpochRecord> history;
  int epochs_run = 0;
  bool early_stopped = false;
};

namespace detail {

/// Shared minibatch loop: one epoch of Adam over a shuffled permutation.
/// on_step is called before every optimizer step with the global step
/// index (pruning hooks in here).  Returns the epoch's mean train MSE.
template <typename Scalar, typename StepHook>
double run_epoch(MlpModelT<Scalar>& model, AdamStateT<Scalar>& adam,
                 const WindowedDatasetT<Scalar>& data, const TrainConfig& cfg,
                 std::vector<Index>& order, UniformSampler& shuffle_rng,
                 long& global_step, StepHook&& on_step) {
  shuffle_in_place(order, shuffle_rng);
  const Index rows = data.inputs.rows();
  const Index batch = std::min<Index>(cfg.batch_size, rows);
  double sq_sum = 0.0;
  double n_terms = 0.0;
  MatrixX<Scalar> x, t;
  for (Index start = 0; start < rows; start += batch) {
    const Index b = std::min(batch, rows - start);
    x.resize(b, data.inputs.cols());
    t.resize(b, data.targets.cols());
    for (Index i = 0; i < b; ++i) {
      x.row(i) = data.inputs.row(order[static_cast<std::size_t>(start + i)]);
      t.row(i) = data.targets.row(order[static_cast<std::size_t>(start + i)]);
    }
    on_step(global_step);
    ForwardCacheT<Scalar> cache;
    const MatrixX<Scalar> y = forward(model, x, &cache);
    const double batch_mse = mse_loss(y, t);
    sq_sum += batch_mse * static_cast<double>(y.size());
    n_terms += static_cast<double>(y.size());
    adam_step(model, adam, backward_mse(model, cache, t), cfg);
    ++global_step;
  }
  return sq_sum / n_terms;
}

template <typename Scalar>
EpochRecord make_record(int epoch, double train_mse, const MlpModelT<Scalar>& model,
                        const SymbolBlock* test_block, int neighbors, Polarization pol) {
  EpochRecord rec;
  rec.epoch = epoch;
  rec.train_mse = train_mse;
  if (test_block) {
    const QualityMetrics q = evaluate_q(model, *test_block, neighbors, pol);
    rec.test_ber = q.ber;
    rec.test_q_db = q.q_db;
  }
  return rec;
}

}  // namespace detail

/// Minibatch Adam training with early stopping.
///
/// The train loss of an epoch is compared against the best loss seen so
/// far (the pre-training evaluation counts as seen); an epoch whose
/// relative improvement falls below min_delta increments the patience
/// counter, any sufficient improvement resets it, and training stops once
/// the counter reaches patience_epochs.  Throws std::runtime_error naming
/// the epoch if the loss turns non-finite.
///
/// When test_block is given, every epoch's record carries the model's
/// test-set BER and Q as a nonlinear equalizer (see evaluate_q).
template <typename Scalar>
TrainResult train_mlp(MlpModelT<Scalar>& model, const WindowedDatasetT<Scalar>& data,
                      const TrainConfig& cfg, const SymbolBlock* test_block = nullptr) {
  check_model(model);
  cfg.validate();
  if (data.inputs.rows() == 0) throw std::invalid_argument("train_mlp: empty dataset");
  if (data.inputs.rows() != data.targets.rows())
    throw std::invalid_argument("train_mlp: inputs/targets row mismatch");

  AdamStateT<Scalar> adam;
  UniformSampler shuffle_rng(cfg.shuffle_seed);
  std::vector<Index> order(static_cast<std::size_t>(data.inputs.rows()));
  std::iota(order.begin(), order.end(), Index(0));

  TrainResult result;
  long global_step = 0;
  double best = evaluate_mse(model, data);
  int patience_counter = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double epoch_mse = detail::run_epoch(model, adam, data, cfg, order, shuffle_rng,
                                               global_step, [](long) {});
    if (!std::isfinite(epoch_mse))
      throw std::runtime_error("train_mlp: training diverged at epoch " + std::to_string(epoch));
    result.history.push_back(
        detail::make_record(epoch, epoch_mse, model, test_block, data.neighbors, data.pol));
    result.epochs_run = epoch;

    const double improvement = (best - epoch_mse) / std::max(best, 1e-300);
    if (improvement >= cfg.min_delta) {
      patience_counter = 0;
    } else {
      ++patience_counter;
    }
    if (epoch_mse < best) best = epoch_mse;
    if (patience_counter >= cfg.patience_epochs) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace opteq
