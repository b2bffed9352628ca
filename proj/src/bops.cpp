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
#include "opteq/bops.hpp"

#include <cmath>
#include <stdexcept>

namespace opteq {

namespace {

void check_widths(Index n_in, Index n_out, int b_in, int b_w) {
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("bops: layer widths must be positive");
  if (b_in < 1 || b_w < 1) throw std::invalid_argument("bops: bit widths must be positive");
}

}  // namespace

double bops_layer(Index n_in, Index n_out, int b_in, int b_w, double pruned_fraction) {
  check_widths(n_in, n_out, b_in, b_w);
  if (!(pruned_fraction >= 0.0 && pruned_fraction <= 1.0))
    throw std::invalid_argument("bops: pruned fraction outside [0, 1]");
  const double n = static_cast<double>(n_in);
  const double m = static_cast<double>(n_out);
  return n * m *
         ((1.0 - pruned_fraction) * b_in * b_w + (b_in + b_w) * std::log2(n));
}

double bops_mlp(const std::vector<Index>& dims, const BitWidths& bw, double pruned_fraction) {
  if (dims.size() < 2) throw std::invalid_argument("bops_mlp: need at least two layer widths");
  double total = 0.0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int b_in = (l == 0) ? bw.input : bw.activation;
    total += bops_layer(dims[l], dims[l + 1], b_in, bw.weight, pruned_fraction);
  }
  return total;
}

double bops_dense_simple(Index n_in, Index n_out, int b_a, int b_w) {
  check_widths(n_in, n_out, b_a, b_w);
  const double n = static_cast<double>(n_in);
  return n * static_cast<double>(n_out) * (b_a * b_w + b_a + b_w + std::log2(n));
}

double reduction_pct(double baseline, double current) {
  if (!(baseline > 0.0)) throw std::invalid_argument("reduction_pct: baseline must be positive");
  return 100.0 * (1.0 - current / baseline);
}

}  // namespace opteq
