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
#include "opteq/quant.hpp"

#include "opteq/prune.hpp"
#include "opteq/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace opteq;

TEST_CASE("scalar quantizer rounds half away from zero and clips") {
  QuantParams p;
  p.scale = 0.1;
  CHECK(quantize_value(0.05, p) == 1);
  CHECK(quantize_value(-0.05, p) == -1);
  CHECK(quantize_value(0.0499, p) == 0);
  CHECK(quantize_value(-0.0499, p) == 0);
  CHECK(quantize_value(0.25, p) == 3);  // 2.5 rounds away from zero
  CHECK(quantize_value(100.0, p) == 127);
  CHECK(quantize_value(-100.0, p) == -127);

  p.scale = 1.0 / 127.0;
  CHECK(quantize_value(1.0, p) == 127);
  CHECK(quantize_value(2.0, p) == 127);
  CHECK(quantize_value(-1.0, p) == -127);

  CHECK(dequantize_value(64, p) == doctest::Approx(64.0 / 127.0).epsilon(1e-15));

  QuantParams bad;
  bad.scale = 0.0;
  CHECK_THROWS_AS(quantize_value(0.5, bad), std::invalid_argument);
  CHECK_THROWS_AS(quantize_value(std::nan(""), p), std::invalid_argument);
}

TEST_CASE("round-trip error stays within half a step and negation is symmetric") {
  QuantParams p;
  p.scale = 0.03;
  const double max_in_range = p.scale * 127.0;
  for (int k = -1000; k <= 1000; ++k) {
    const double x = max_in_range * double(k) / 1000.0;
    const int q = quantize_value(x, p);
    CHECK(std::abs(dequantize_value(q, p) - x) <= 0.5 * p.scale + 1e-15);
    CHECK(quantize_value(-x, p) == -q);
  }
}

TEST_CASE("calibration records one range per layer boundary") {
  MlpModel m = make_mlp<float>({4, 3, 2});
  init_glorot(m, 71);

  Eigen::MatrixXf batch(8, 4);
  GaussianSampler g(73);
  for (Index i = 0; i < batch.size(); ++i) batch.data()[i] = float(g.next());

  const auto ranges = calibrate_activations(m, batch);
  REQUIRE(ranges.size() == 3);
  CHECK(ranges[0].lo == doctest::Approx(batch.minCoeff()));
  CHECK(ranges[0].hi == doctest::Approx(batch.maxCoeff()));
  // the hidden tanh output is confined to (-1, 1)
  CHECK(ranges[1].lo > -1.0);
  CHECK(ranges[1].hi < 1.0);
  CHECK(ranges[1].lo <= ranges[1].hi);
}

TEST_CASE("per-layer weight scales and sparsity accounting") {
  MlpModel m = make_mlp<float>({3, 4, 2});
  init_glorot(m, 79);
  prune_magnitude(m, 0.5);

  Eigen::MatrixXf batch = Eigen::MatrixXf::Random(16, 3);
  const QuantizedModel q = quantize_ptq(m, calibrate_activations(m, batch));

  REQUIRE(q.weights.size() == 2);
  REQUIRE(q.weight_scales.size() == 2);
  CHECK(q.act_scales.size() == 1);
  CHECK(q.act_ranges.size() == 3);
  for (std::size_t l = 0; l < 2; ++l) {
    const double expect = double(m.weights[l].cwiseAbs().maxCoeff()) / 127.0;
    CHECK(q.weight_scales[l] == doctest::Approx(expect).epsilon(1e-12));
    // the extreme weight maps to +-127 and zeros stay zeros
    CHECK(q.weights[l].cwiseAbs().maxCoeff() == 127);
    for (Index i = 0; i < m.weights[l].size(); ++i)
      if (m.weights[l].data()[i] == 0.0f) CHECK(q.weights[l].data()[i] == 0);
  }

  // at least the pruned half of the weights is zero in INT8 form
  std::size_t zeros = 0;
  for (const auto& w : q.weights) zeros += std::size_t((w.array() == 0).count());
  CHECK(q.recorded_sparsity == doctest::Approx(double(zeros) / double(q.weight_count())));
  CHECK(q.recorded_sparsity >= 0.5);
}

TEST_CASE("integer inference follows the documented fixed-point algorithm") {
  // identity activations and hand-picked weights make every intermediate
  // exactly representable, so the integer path can be replayed by hand
  MlpModel m = make_mlp<float>({2, 2, 2}, Activation::kIdentity);
  m.weights[0] << 0.5f, 0.0f, 0.0f, 0.25f;
  m.weights[1] << 1.0f, -1.0f, 0.5f, 0.0f;

  // inputs chosen so no rescaled value lands on a rounding boundary
  Eigen::MatrixXf x(1, 2);
  x << 0.4f, 0.8f;

  std::vector<ActRange> ranges(3);
  ranges[0] = {-2.0, 2.0};
  ranges[1] = {-1.0, 1.0};
  ranges[2] = {-2.0, 2.0};

  const QuantizedModel q = quantize_ptq(m, ranges);

  // weight integers: scales are max|W|/127
  CHECK(q.weights[0](0, 0) == 127);
  CHECK(q.weights[0](1, 1) == 64);  // 0.25 / (0.5/127) = 63.5 rounds away to 64
  CHECK(q.weights[1](0, 0) == 127);
  CHECK(q.weights[1](0, 1) == -127);
  CHECK(q.weights[1](1, 0) == 64);

  const Eigen::MatrixXf y = infer_int8(q, x);

  // replay: layer 1 in float with dequantized weights, then quantize at
  // scale 1/127, integer GEMM, rescale
  const double sw0 = q.weight_scales[0], sa = q.act_scales[0], sw1 = q.weight_scales[1];
  const double a0 = 0.4 * (127 * sw0);  // ~0.2   -> index 25 (25.4 rounds down)
  const double a1 = 0.8 * (64 * sw0);   // ~0.202 -> index 26 (25.6 rounds up)
  const int qa0 = quantize_value(a0, {sa, -127, 127});
  const int qa1 = quantize_value(a1, {sa, -127, 127});
  CHECK(qa0 == 25);
  CHECK(qa1 == 26);
  const double y0 = (qa0 * 127 + qa1 * 64) * (sa * sw1);
  const double y1 = (qa0 * -127 + qa1 * 0) * (sa * sw1);
  CHECK(y(0, 0) == doctest::Approx(y0).epsilon(1e-6));
  CHECK(y(0, 1) == doctest::Approx(y1).epsilon(1e-6));
}

TEST_CASE("integer inference tracks the float model within a few quant steps") {
  MlpModel m = make_mlp<float>({6, 8, 2});
  init_glorot(m, 83);

  Eigen::MatrixXf batch(64, 6);
  GaussianSampler g(89);
  for (Index i = 0; i < batch.size(); ++i) batch.data()[i] = float(0.5 * g.next());

  const QuantizedModel q = quantize_ptq(m, calibrate_activations(m, batch));
  const Eigen::MatrixXf y_int = infer_int8(q, batch);
  const Eigen::MatrixXf y_ref = forward(dequantize_weights(q), batch);
  CHECK((y_int - y_ref).cwiseAbs().maxCoeff() < 0.15);

  Eigen::MatrixXf bad(2, 5);
  bad.setZero();
  CHECK_THROWS_AS(infer_int8(q, bad), std::invalid_argument);
}

TEST_CASE("layers wide enough to overflow the int32 accumulator are rejected") {
  // 140000 * 127 * 127 exceeds the 31-bit accumulator budget
  MlpModel m = make_mlp<float>({1, 140000, 1});
  m.weights[0].setConstant(0.01f);
  m.weights[1].setConstant(0.01f);

  std::vector<ActRange> ranges(3);
  ranges[0] = {-1.0, 1.0};
  ranges[1] = {-1.0, 1.0};
  ranges[2] = {-1.0, 1.0};
  CHECK_THROWS_AS(quantize_ptq(m, ranges), std::runtime_error);
}
