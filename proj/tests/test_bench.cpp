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

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

using namespace opteq;

TEST_CASE("the latency protocol times every call except the warm-up") {
  LatencyConfig cfg;
  cfg.n_symbols = 64;
  cfg.n_inferences = 7;
  cfg.n_repeats = 4;

  int calls = 0;
  const LatencyStats s = bench_latency([&] { ++calls; }, cfg);

  CHECK(calls == cfg.n_repeats * cfg.n_inferences + 1);
  CHECK(s.raw_seconds.size() == std::size_t(cfg.n_repeats * cfg.n_inferences));
  CHECK(s.repeat_means_s.size() == std::size_t(cfg.n_repeats));
  CHECK(s.n_repeats == 4);
  CHECK(s.n_inferences == 7);
  CHECK(s.n_symbols == 64);
}

TEST_CASE("mean and sigma are recomputable from the raw timings") {
  LatencyConfig cfg;
  cfg.n_symbols = 100;
  cfg.n_inferences = 5;
  cfg.n_repeats = 6;

  // the workload sleeps long enough that timings dominate clock granularity
  const LatencyStats s = bench_latency(
      [] { std::this_thread::sleep_for(std::chrono::microseconds(200)); }, cfg);

  const double raw_mean =
      std::accumulate(s.raw_seconds.begin(), s.raw_seconds.end(), 0.0) / s.raw_seconds.size();
  CHECK(s.mean_s == doctest::Approx(raw_mean).epsilon(1e-12));

  double ss = 0.0;
  for (double m : s.repeat_means_s) ss += (m - s.mean_s) * (m - s.mean_s);
  const double sigma = std::sqrt(ss / (cfg.n_repeats - 1));
  CHECK(s.sigma_s == doctest::Approx(sigma).epsilon(1e-12));

  CHECK(s.per_symbol_us == doctest::Approx(s.mean_s / 100.0 * 1e6).epsilon(1e-12));
  CHECK(s.mean_s >= 150e-6);  // each call slept for at least ~200 us
}

TEST_CASE("a single repeat reports zero spread") {
  LatencyConfig cfg;
  cfg.n_symbols = 10;
  cfg.n_inferences = 3;
  cfg.n_repeats = 1;
  const LatencyStats s = bench_latency([] {}, cfg);
  CHECK(s.sigma_s == 0.0);
  CHECK(s.repeat_means_s.size() == 1);
}

TEST_CASE("near-instant workloads raise the timer warning") {
  LatencyConfig cfg;
  cfg.n_symbols = 1;
  cfg.n_inferences = 2;
  cfg.n_repeats = 2;
  const LatencyStats fast = bench_latency([] {}, cfg);
  CHECK(fast.timer_warning);

  const LatencyStats slow = bench_latency(
      [] { std::this_thread::sleep_for(std::chrono::milliseconds(2)); }, cfg);
  CHECK_FALSE(slow.timer_warning);
}

TEST_CASE("the clock resolution estimate is a sane positive number") {
  const double res = timer_resolution_estimate_s();
  CHECK(res > 0.0);
  CHECK(res < 1e-3);  // steady_clock is far better than millisecond-grained
}

TEST_CASE("degenerate configurations are rejected") {
  LatencyConfig cfg;
  cfg.n_symbols = 0;
  CHECK_THROWS_AS(bench_latency([] {}, cfg), std::invalid_argument);
  cfg.n_symbols = 1;
  cfg.n_inferences = 0;
  CHECK_THROWS_AS(bench_latency([] {}, cfg), std::invalid_argument);
  cfg.n_inferences = 1;
  cfg.n_repeats = -2;
  CHECK_THROWS_AS(bench_latency([] {}, cfg), std::invalid_argument);
}
