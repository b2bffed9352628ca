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
#include "opteq/train.hpp"

#include "opteq/prune.hpp"
#include "opteq/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace opteq;

namespace {

WindowedDatasetT<double> toy_dataset(Index rows, Index in_cols, Index out_cols,
                                     std::uint64_t seed) {
  WindowedDatasetT<double> data;
  data.inputs.resize(rows, in_cols);
  data.targets.resize(rows, out_cols);
  GaussianSampler g(seed);
  for (Index i = 0; i < data.inputs.size(); ++i) data.inputs.data()[i] = g.next();
  for (Index i = 0; i < data.targets.size(); ++i) data.targets.data()[i] = g.next();
  return data;
}

}  // namespace

TEST_CASE("configuration validation rejects out-of-range settings") {
  TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = TrainConfig{};
  bad.patience_epochs = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = TrainConfig{};
  bad.beta2 = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("the first Adam update matches the closed-form expression") {
  MlpModelT<double> m = make_mlp<double>({1, 1});
  m.weights[0](0, 0) = 0.4;

  TrainConfig cfg;
  cfg.batch_size = 1;
  AdamStateT<double> state;

  const double g = 0.8;  // hand-picked gradient
  std::vector<MatrixX<double>> grads(1, MatrixX<double>::Constant(1, 1, g));
  adam_step(m, state, grads, cfg);

  // bias-corrected first step: lr * g / (|g| + eps)
  const double expect1 = 0.4 - cfg.learning_rate * g / (std::abs(g) + cfg.epsilon);
  CHECK(m.weights[0](0, 0) == doctest::Approx(expect1).epsilon(1e-15));
  CHECK(state.step == 1);

  // second step with the same gradient, tracked against the recurrences
  adam_step(m, state, grads, cfg);
  const double m2 = (0.9 * (0.1 * g) + 0.1 * g) / (1.0 - 0.9 * 0.9);
  const double v2 = (0.999 * (0.001 * g * g) + 0.001 * g * g) / (1.0 - 0.999 * 0.999);
  const double expect2 = expect1 - cfg.learning_rate * m2 / (std::sqrt(v2) + cfg.epsilon);
  CHECK(m.weights[0](0, 0) == doctest::Approx(expect2).epsilon(1e-14));
}

TEST_CASE("one training epoch equals a manual forward/backward/update sequence") {
  const auto data = toy_dataset(4, 2, 2, 31);

  MlpModelT<double> trained = make_mlp<double>({2, 3, 2});
  init_glorot(trained, 5);
  MlpModelT<double> manual = trained;

  TrainConfig cfg;
  cfg.batch_size = 4;  // one full-batch step per epoch, no shuffling effects
  cfg.max_epochs = 1;
  const TrainResult r = train_mlp(trained, data, cfg);
  REQUIRE(r.epochs_run == 1);

  AdamStateT<double> state;
  ForwardCacheT<double> cache;
  forward(manual, data.inputs, &cache);
  adam_step(manual, state, backward_mse(manual, cache, data.targets), cfg);

  // the epoch shuffles row order, which only reassociates the batch sums
  for (std::size_t l = 0; l < manual.weights.size(); ++l)
    CHECK((trained.weights[l] - manual.weights[l]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.history[0].train_mse == doctest::Approx(mse_loss(forward(trained, data.inputs),
                                                           data.targets))
                                      .epsilon(0.5));  // pre- vs post-update loss differ slightly
}

TEST_CASE("a linear target function is learned to high accuracy") {
  MatrixX<double> w_true(2, 2);
  w_true << 1.5, -0.3, 0.7, 2.0;

  WindowedDatasetT<double> data;
  data.inputs = toy_dataset(64, 2, 2, 77).inputs;
  data.targets = data.inputs * w_true;

  MlpModelT<double> m = make_mlp<double>({2, 2});
  init_glorot(m, 9);

  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 16;
  cfg.max_epochs = 300;
  cfg.min_delta = 0.0;  // improvement can never fall below the threshold
  cfg.shuffle_seed = 123;
  const TrainResult r = train_mlp(m, data, cfg);

  CHECK_FALSE(r.early_stopped);
  CHECK(r.epochs_run == 300);
  CHECK(evaluate_mse(m, data) < 1e-6);
  CHECK((m.weights[0] - w_true).cwiseAbs().maxCoeff() < 1e-2);
  // loss history is finite and overall decreasing
  CHECK(r.history.front().train_mse > r.history.back().train_mse);
}

TEST_CASE("training stops after exactly `patience` stagnant epochs") {
  // targets generated by the model itself: the loss starts at zero, every
  // gradient vanishes, and no epoch can improve on the pre-training loss
  MlpModelT<double> m = make_mlp<double>({2, 2});
  init_glorot(m, 13);
  WindowedDatasetT<double> data;
  data.inputs = toy_dataset(8, 2, 2, 17).inputs;
  data.targets = forward(m, data.inputs);

  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.max_epochs = 50;
  cfg.patience_epochs = 5;
  const TrainResult r = train_mlp(m, data, cfg);
  CHECK(r.early_stopped);
  CHECK(r.epochs_run == 5);
  CHECK(r.history.size() == 5);
  CHECK(r.history.back().train_mse == 0.0);
}

TEST_CASE("non-finite losses abort training with a diagnostic") {
  MlpModelT<double> m = make_mlp<double>({2, 2});
  init_glorot(m, 19);
  auto data = toy_dataset(4, 2, 2, 23);
  data.inputs(1, 0) = std::numeric_limits<double>::quiet_NaN();

  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.max_epochs = 3;
  CHECK_THROWS_AS(train_mlp(m, data, cfg), std::runtime_error);
}

TEST_CASE("pruned positions stay exactly zero through further training") {
  MlpModelT<double> m = make_mlp<double>({3, 6, 2});
  init_glorot(m, 29);
  prune_magnitude(m, 0.5);
  const MlpModelT<double> before = m;

  auto data = toy_dataset(32, 3, 2, 37);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.max_epochs = 10;
  cfg.min_delta = 0.0;
  train_mlp(m, data, cfg);

  bool some_weight_moved = false;
  for (std::size_t l = 0; l < m.weights.size(); ++l)
    for (Index i = 0; i < m.weights[l].size(); ++i) {
      if (before.masks[l].data()[i] == 0.0)
        CHECK(m.weights[l].data()[i] == 0.0);
      else if (m.weights[l].data()[i] != before.weights[l].data()[i])
        some_weight_moved = true;
    }
  CHECK(some_weight_moved);
}

TEST_CASE("epoch records carry test metrics only when a test block is given") {
  MlpModelT<float> m = make_mlp<float>({4, 2});
  init_glorot(m, 41);
  WindowedDatasetT<float> data;
  data.inputs = Eigen::MatrixXf::Constant(6, 4, 0.1f);
  data.targets = Eigen::MatrixXf::Constant(6, 2, 0.2f);
  data.neighbors = 0;

  TrainConfig cfg;
  cfg.batch_size = 6;
  cfg.max_epochs = 2;

  const TrainResult without = train_mlp(m, data, cfg);
  CHECK(std::isnan(without.history[0].test_ber));

  SymbolBlock block;
  block.tx_h = ArrayXc::Constant(5, Complex(0.3, 0.3));
  block.tx_v = block.tx_h;
  block.rx_h = block.tx_h;
  block.rx_v = block.tx_h;
  const TrainResult with_test = train_mlp(m, data, cfg, &block);
  CHECK_FALSE(std::isnan(with_test.history[0].test_ber));
  CHECK(with_test.history[0].test_ber >= 0.0);
}
