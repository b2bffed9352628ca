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
#include "opteq/bench.hpp"

#include <chrono>

namespace opteq {

double timer_resolution_estimate_s() {
  using Clock = std::chrono::steady_clock;
  double best = 1.0;
  for (int probe = 0; probe < 32; ++probe) {
    const auto t0 = Clock::now();
    auto t1 = Clock::now();
    while (t1 == t0) t1 = Clock::now();
    const double dt = std::chrono::duration<double>(t1 - t0).count();
    if (dt > 0.0 && dt < best) best = dt;
  }
  return best;
}

}  // namespace opteq
