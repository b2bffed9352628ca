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

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace opteq {

struct LatencyConfig {
  Index n_symbols = 30000;  ///< symbols processed by one inference call
  int n_inferences = 100;   ///< timed calls per repeat
  int n_repeats = 25;       ///< outer repetitions

  void validate() const {
    if (n_symbols < 1) throw std::invalid_argument("bench: n_symbols must be >= 1");
    if (n_inferences < 1) throw std::invalid_argument("bench: n_inferences must be >= 1");
    if (n_repeats < 1) throw std::invalid_argument("bench: n_repeats must be >= 1");
  }
};

struct LatencyStats {
  double mean_s = 0.0;          ///< mean per-inference wall time
  double sigma_s = 0.0;         ///< sample std-dev across repeat means (0 if one repeat)
  double per_symbol_us = 0.0;   ///< mean_s / n_symbols in microseconds
  int n_repeats = 0;
  int n_inferences = 0;
  Index n_symbols = 0;
  bool timer_warning = false;   ///< true when timings approach the clock resolution
  std::vector<double> raw_seconds;     ///< every timed call, repeat-major order
  std::vector<double> repeat_means_s;  ///< per-repeat averages
};

/// Smallest observable positive increment of the steady clock.
double timer_resolution_estimate_s();

/// Wall-clock latency protocol: one untimed warm-up call, then n_repeats
/// blocks of n_inferences individually timed calls.  The reported mean is
/// the grand mean of all timed calls (equal to the mean of the per-repeat
/// averages since every repeat times the same number of calls); sigma is
/// the sample standard deviation across the per-repeat averages.
template <typename F>
LatencyStats bench_latency(F&& run_once, const LatencyConfig& cfg) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;

  LatencyStats stats;
  stats.n_repeats = cfg.n_repeats;
  stats.n_inferences = cfg.n_inferences;
  stats.n_symbols = cfg.n_symbols;
  stats.raw_seconds.reserve(static_cast<std::size_t>(cfg.n_repeats) * cfg.n_inferences);

  run_once();  // warm-up: caches, lazy allocations, page faults

  for (int r = 0; r < cfg.n_repeats; ++r) {
    double repeat_sum = 0.0;
    for (int i = 0; i < cfg.n_inferences; ++i) {
      const auto t0 = Clock::now();
      run_once();
      const auto t1 = Clock::now();
      const double dt = std::chrono::duration<double>(t1 - t0).count();
      stats.raw_seconds.push_back(dt);
      repeat_sum += dt;
    }
    stats.repeat_means_s.push_back(repeat_sum / cfg.n_inferences);
  }

  double grand_sum = 0.0;
  for (double m : stats.repeat_means_s) grand_sum += m;
  stats.mean_s = grand_sum / cfg.n_repeats;
  if (cfg.n_repeats > 1) {
    double ss = 0.0;
    for (double m : stats.repeat_means_s) ss += (m - stats.mean_s) * (m - stats.mean_s);
    stats.sigma_s = std::sqrt(ss / (cfg.n_repeats - 1));
  }
  stats.per_symbol_us = stats.mean_s / static_cast<double>(cfg.n_symbols) * 1e6;
  stats.timer_warning = stats.mean_s < 100.0 * timer_resolution_estimate_s();
  return stats;
}

}  // namespace opteq
