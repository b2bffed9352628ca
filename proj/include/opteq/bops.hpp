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

#include "opteq/types.hpp"

#include <vector>

namespace opteq {

/// Bit widths entering the bit-operation count of one inference.
struct BitWidths {
  int input = 32;       ///< width of the network input samples
  int activation = 32;  ///< width of hidden activations
  int weight = 32;      ///< width of the weights
};

/// Bit operations of one fully connected layer with n_in inputs and n_out
/// outputs: n_in * n_out * ((1 - pruned_fraction) * b_in * b_w
/// + (b_in + b_w) * log2(n_in)).  The multiplier term scales with the kept
/// weights; the accumulator term log2(n_in) covers the carry growth of the
/// adder tree.
double bops_layer(Index n_in, Index n_out, int b_in, int b_w, double pruned_fraction);

/// Sum of bops_layer over the network: the first layer sees input-width
/// operands, all later layers activation-width operands.
double bops_mlp(const std::vector<Index>& dims, const BitWidths& bw, double pruned_fraction);

/// Simpler dense-layer estimate n_in * n_out * (b_a * b_w + b_a + b_w
/// + log2(n_in)), kept as a labeled alternative accounting mode.
double bops_dense_simple(Index n_in, Index n_out, int b_a, int b_w);

/// 100 * (1 - current / baseline); throws if baseline is not positive.
double reduction_pct(double baseline, double current);

}  // namespace opteq
