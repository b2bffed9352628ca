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

#include <algorithm>
#include <cmath>
#include <limits>

namespace opteq {

int quantize_value(double x, const QuantParams& p) {
  if (p.scale <= 0.0) throw std::invalid_argument("quantize_value: scale must be positive");
  if (!std::isfinite(x)) throw std::invalid_argument("quantize_value: non-finite input");
  const double q = std::round(x / p.scale);  // std::round: halves away from zero
  if (q < p.qmin) return p.qmin;
  if (q > p.qmax) return p.qmax;
  return static_cast<int>(q);
}

double dequantize_value(int q, const QuantParams& p) {
  if (p.scale <= 0.0) throw std::invalid_argument("dequantize_value: scale must be positive");
  return static_cast<double>(q) * p.scale;
}

namespace {

// Guards the int32 accumulator: fan_in * 127 * 127 must fit.
void check_accumulator_width(const std::vector<Index>& dims) {
  constexpr std::int64_t limit = std::numeric_limits<std::int32_t>::max();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (static_cast<std::int64_t>(dims[l]) * 127 * 127 > limit)
      throw std::runtime_error("quantize: fan-in too wide for int32 accumulation");
  }
}

double symmetric_scale(double max_abs) { return (max_abs > 0.0) ? max_abs / 127.0 : 1.0; }

Int8Matrix quantize_matrix(const Eigen::MatrixXf& w, double scale) {
  const QuantParams p{scale, -127, 127};
  Int8Matrix q(w.rows(), w.cols());
  for (Index c = 0; c < w.cols(); ++c)
    for (Index r = 0; r < w.rows(); ++r)
      q(r, c) = static_cast<std::int8_t>(quantize_value(static_cast<double>(w(r, c)), p));
  return q;
}

}  // namespace

QuantizedModel quantize_ptq(const MlpModelT<float>& model, const std::vector<ActRange>& ranges) {
  check_model(model);
  if (ranges.size() != model.dims.size())
    throw std::invalid_argument("quantize_ptq: one calibration range per layer boundary required");
  for (const ActRange& r : ranges) {
    if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi)
      throw std::invalid_argument("quantize_ptq: invalid calibration range");
  }
  check_accumulator_width(model.dims);

  QuantizedModel q;
  q.dims = model.dims;
  q.hidden_activations = model.hidden_activations;
  q.act_ranges = ranges;
  std::size_t zero_count = 0;
  for (const auto& w : model.weights) {
    const double scale = symmetric_scale(static_cast<double>(w.cwiseAbs().maxCoeff()));
    q.weight_scales.push_back(scale);
    q.weights.push_back(quantize_matrix(w, scale));
    zero_count += static_cast<std::size_t>((q.weights.back().array() == 0).count());
  }
  // Scales for the quantized hidden activations (boundaries 1 .. L-1).
  for (std::size_t b = 1; b + 1 < ranges.size(); ++b)
    q.act_scales.push_back(symmetric_scale(std::max(std::abs(ranges[b].lo), std::abs(ranges[b].hi))));
  q.recorded_sparsity =
      static_cast<double>(zero_count) / static_cast<double>(std::max<std::size_t>(q.weight_count(), 1));
  return q;
}

namespace {

Int8Matrix quantize_activations(const Eigen::MatrixXf& a, double scale) {
  const QuantParams p{scale, -127, 127};
  Int8Matrix q(a.rows(), a.cols());
  for (Index c = 0; c < a.cols(); ++c)
    for (Index r = 0; r < a.rows(); ++r)
      q(r, c) = static_cast<std::int8_t>(quantize_value(static_cast<double>(a(r, c)), p));
  return q;
}

Eigen::MatrixXf apply_activation_f(const Eigen::MatrixXf& z, Activation a) {
  return apply_activation<float>(z, a);
}

}  // namespace

Eigen::MatrixXf infer_int8(const QuantizedModel& q, const Eigen::MatrixXf& x) {
  const Index n_layers = q.n_layers();
  if (n_layers == 0) throw std::invalid_argument("infer_int8: model has no layers");
  if (q.hidden_activations.size() != static_cast<std::size_t>(n_layers) - 1 ||
      q.weight_scales.size() != static_cast<std::size_t>(n_layers) ||
      q.act_scales.size() != static_cast<std::size_t>(n_layers) - 1)
    throw std::invalid_argument("infer_int8: inconsistent quantized model");
  if (x.cols() != q.dims.front())
    throw std::invalid_argument("infer_int8: input width does not match dims[0]");
  for (Index l = 0; l < n_layers; ++l) {
    const auto& w = q.weights[static_cast<std::size_t>(l)];
    if (w.rows() != q.dims[static_cast<std::size_t>(l)] ||
        w.cols() != q.dims[static_cast<std::size_t>(l) + 1])
      throw std::invalid_argument("infer_int8: weight shape mismatch");
  }
  check_accumulator_width(q.dims);

  using Int32Matrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;

  // First layer: float input times dequantized weights (input stays fp32).
  Eigen::MatrixXf z =
      x * (q.weights[0].cast<float>() * static_cast<float>(q.weight_scales[0]));
  if (n_layers == 1) return z;

  Eigen::MatrixXf a = apply_activation_f(z, q.hidden_activations[0]);
  Int8Matrix qa = quantize_activations(a, q.act_scales[0]);
  for (Index l = 1; l < n_layers; ++l) {
    const std::size_t lu = static_cast<std::size_t>(l);
    const Int32Matrix acc = qa.cast<std::int32_t>() * q.weights[lu].cast<std::int32_t>();
    const float rescale = static_cast<float>(q.act_scales[lu - 1] * q.weight_scales[lu]);
    z = acc.cast<float>() * rescale;
    if (l + 1 == n_layers) return z;
    a = apply_activation_f(z, q.hidden_activations[lu]);
    qa = quantize_activations(a, q.act_scales[lu]);
  }
  return z;
}

MlpModelT<float> dequantize_weights(const QuantizedModel& q) {
  MlpModelT<float> m;
  m.dims = q.dims;
  m.hidden_activations = q.hidden_activations;
  for (std::size_t l = 0; l < q.weights.size(); ++l)
    m.weights.push_back(q.weights[l].cast<float>() * static_cast<float>(q.weight_scales[l]));
  check_model(m);
  return m;
}

}  // namespace opteq
