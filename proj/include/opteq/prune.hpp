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

#include "opteq/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace opteq {

/// Polynomial decay sparsity schedule for gradual magnitude pruning.
struct PruneSchedule {
  double initial_sparsity = 0.0;
  double final_sparsity = 0.6;
  double power = 3.0;
  long prune_every_steps = 50;  ///< masks update every this many optimizer steps
  int total_epochs = 300;       ///< fine-tuning epochs over which the schedule runs

  void validate() const {
    if (!(initial_sparsity >= 0.0 && initial_sparsity <= final_sparsity && final_sparsity <= 1.0))
      throw std::invalid_argument("prune: need 0 <= initial <= final sparsity <= 1");
    if (power <= 0.0) throw std::invalid_argument("prune: schedule power must be positive");
    if (prune_every_steps < 1) throw std::invalid_argument("prune: prune_every_steps must be >= 1");
    if (total_epochs < 1) throw std::invalid_argument("prune: total_epochs must be >= 1");
  }
};

/// Target sparsity after `step` of `total_steps` optimizer steps:
/// s(t) = sf + (s0 - sf) (1 - t/T)^power, evaluated only at multiples of
/// prune_every_steps (the value is held constant in between) and pinned
/// to exactly sf from step T onward.
inline double target_sparsity(long step, long total_steps, const PruneSchedule& sched) {
  sched.validate();
  if (total_steps < 1) throw std::invalid_argument("target_sparsity: total_steps must be >= 1");
  const long t = std::clamp(step, 0L, total_steps);
  if (t >= total_steps) return sched.final_sparsity;
  const long quantized = (t / sched.prune_every_steps) * sched.prune_every_steps;
  const double frac = 1.0 - static_cast<double>(quantized) / static_cast<double>(total_steps);
  return sched.final_sparsity +
         (sched.initial_sparsity - sched.final_sparsity) * std::pow(frac, sched.power);
}

/// Magnitude pruning with layer-wise proportional allocation: each layer
/// masks its floor(sparsity * count) smallest-magnitude weights (ties
/// broken by storage index), zeroing them in place.  Already-zero weights
/// rank first, so repeated calls with a non-decreasing sparsity never
/// resurrect a pruned weight.  Initializes masks if absent.
template <typename Scalar>
void prune_magnitude(MlpModelT<Scalar>& model, double sparsity) {
  check_model(model);
  if (!(sparsity >= 0.0 && sparsity <= 1.0))
    throw std::invalid_argument("prune_magnitude: sparsity outside [0, 1]");
  if (!model.has_masks()) {
    for (const auto& w : model.weights)
      model.masks.push_back(MatrixX<Scalar>::Ones(w.rows(), w.cols()));
  }
  std::vector<std::pair<Scalar, Index>> ranked;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    MatrixX<Scalar>& w = model.weights[l];
    MatrixX<Scalar>& mask = model.masks[l];
    const Index count = w.size();
    const Index n_prune =
        static_cast<Index>(std::floor(sparsity * static_cast<double>(count)));
    ranked.clear();
    ranked.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i)
      ranked.emplace_back(std::abs(w.data()[i]), i);
    std::sort(ranked.begin(), ranked.end());
    mask.setOnes();
    for (Index i = 0; i < n_prune; ++i) {
      const Index at = ranked[static_cast<std::size_t>(i)].second;
      mask.data()[at] = Scalar(0);
      w.data()[at] = Scalar(0);
    }
  }
}

struct PruneResult {
  std::vector<EpochRecord> history;
  /// (optimizer step, target sparsity) at every mask update, in order.
  std::vector<std::pair<long, double>> sparsity_trace;
};

/// Gradual magnitude pruning with fine-tuning: runs exactly
/// sched.total_epochs of minibatch Adam (fresh optimizer state, no early
/// stopping so the schedule always completes), updating the masks every
/// sched.prune_every_steps optimizer steps along the polynomial schedule
/// and once more at the end to pin the final sparsity.
template <typename Scalar>
PruneResult prune_with_finetune(MlpModelT<Scalar>& model, const PruneSchedule& sched,
                                const WindowedDatasetT<Scalar>& data, const TrainConfig& cfg,
                                const SymbolBlock* test_block = nullptr) {
  check_model(model);
  sched.validate();
  cfg.validate();
  if (data.inputs.rows() == 0) throw std::invalid_argument("prune_with_finetune: empty dataset");

  const Index rows = data.inputs.rows();
  const Index batch = std::min<Index>(cfg.batch_size, rows);
  const long steps_per_epoch = static_cast<long>((rows + batch - 1) / batch);
  const long total_steps = steps_per_epoch * sched.total_epochs;

  AdamStateT<Scalar> adam;  // fresh state: stale momentum must not steer fine-tuning
  UniformSampler shuffle_rng(cfg.shuffle_seed);
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index(0));

  PruneResult result;
  long global_step = 0;
  const auto prune_hook = [&](long step) {
    if (step % sched.prune_every_steps != 0) return;
    const double target = target_sparsity(step, total_steps, sched);
    prune_magnitude(model, target);
    result.sparsity_trace.emplace_back(step, target);
  };
  for (int epoch = 1; epoch <= sched.total_epochs; ++epoch) {
    const double epoch_mse =
        detail::run_epoch(model, adam, data, cfg, order, shuffle_rng, global_step, prune_hook);
    if (!std::isfinite(epoch_mse))
      throw std::runtime_error("prune_with_finetune: training diverged at epoch " +
                               std::to_string(epoch));
    result.history.push_back(
        detail::make_record(epoch, epoch_mse, model, test_block, data.neighbors, data.pol));
  }
  // Close the schedule: from step T onward the target is exactly sf.
  prune_magnitude(model, sched.final_sparsity);
  result.sparsity_trace.emplace_back(total_steps, sched.final_sparsity);
  return result;
}

}  // namespace opteq
