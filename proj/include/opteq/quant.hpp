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

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace opteq {

/// Symmetric uniform quantizer parameters: q = clip(round(x / scale), -127, 127)
/// with zero point 0, so value 0.0 maps to integer 0 exactly.
struct QuantParams {
  double scale = 1.0;
  int qmin = -127;
  int qmax = 127;
};

/// Rounds half away from zero, then clips.
int quantize_value(double x, const QuantParams& p);
double dequantize_value(int q, const QuantParams& p);

/// Observed activation extrema at one layer boundary.
struct ActRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Runs calibration samples through the model and records min/max at every
/// layer boundary: index 0 is the input batch, index l the output of layer
/// l after its activation (dims.size() entries in total).
template <typename Scalar>
std::vector<ActRange> calibrate_activations(const MlpModelT<Scalar>& model,
                                            const MatrixX<Scalar>& samples) {
  check_model(model);
  if (samples.rows() == 0) throw std::invalid_argument("calibrate_activations: empty sample batch");
  ForwardCacheT<Scalar> cache;
  forward(model, samples, &cache);
  std::vector<ActRange> ranges;
  ranges.reserve(cache.act.size());
  for (const auto& a : cache.act) {
    ActRange r;
    r.lo = static_cast<double>(a.minCoeff());
    r.hi = static_cast<double>(a.maxCoeff());
    ranges.push_back(r);
  }
  return ranges;
}

using Int8Matrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Post-training-quantized network: INT8 weights with one symmetric scale
/// per layer, INT8 activations with one scale per hidden boundary; the
/// input and output stay 32-bit float.
struct QuantizedModel {
  std::vector<Index> dims;
  std::vector<Activation> hidden_activations;
  std::vector<Int8Matrix> weights;     ///< weights[l]: dims[l] x dims[l+1]
  std::vector<double> weight_scales;   ///< one per layer
  std::vector<double> act_scales;      ///< one per hidden boundary (n_layers - 1)
  std::vector<ActRange> act_ranges;    ///< calibration record, dims.size() entries
  double recorded_sparsity = 0.0;      ///< zero fraction of the INT8 weights
  int input_bits = 32;
  int act_bits = 8;
  int weight_bits = 8;
  int output_bits = 32;

  Index n_layers() const { return static_cast<Index>(weights.size()); }
  std::size_t weight_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
    return n;
  }
};

/// Symmetric per-tensor post-training quantization.
///
/// Weight scale per layer: max|W| / 127 (1.0 for an all-zero layer), so
/// exact zeros stay exact zeros and the recorded sparsity is the measured
/// zero fraction of the integer weights.  Activation scale per boundary:
/// max(|lo|, |hi|) / 127 from the calibration ranges (one range per
/// boundary as produced by calibrate_activations).
QuantizedModel quantize_ptq(const MlpModelT<float>& model, const std::vector<ActRange>& ranges);

/// Integer inference: the first layer multiplies the float input by the
/// dequantized weights; every later layer accumulates int8 x int8 products
/// in int32, rescales by (activation scale * weight scale), applies the
/// real activation, and re-quantizes.  The output is returned in float.
/// An accumulator-width check at model-build and inference time guarantees
/// the int32 accumulation cannot overflow.
Eigen::MatrixXf infer_int8(const QuantizedModel& q, const Eigen::MatrixXf& x);

/// Float model with weights replaced by their dequantized values
/// (reference path for tests and comparisons).
MlpModelT<float> dequantize_weights(const QuantizedModel& q);

}  // namespace opteq
