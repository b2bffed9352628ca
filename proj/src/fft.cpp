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
#include "opteq/fft.hpp"

namespace opteq {

ArrayXr angular_frequency_grid(Index n, double sample_rate_hz) {
  if (n <= 0) throw std::invalid_argument("angular_frequency_grid: n must be positive");
  if (sample_rate_hz <= 0.0)
    throw std::invalid_argument("angular_frequency_grid: sample rate must be positive");
  ArrayXr omega(n);
  const double domega = 2.0 * M_PI * sample_rate_hz / static_cast<double>(n);
  for (Index k = 0; k < n; ++k) {
    const Index signed_k = (2 * k < n) ? k : k - n;
    omega[k] = domega * static_cast<double>(signed_k);
  }
  return omega;
}

}  // namespace opteq
