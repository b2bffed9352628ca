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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace opteq {

/// Derives an independent stream seed from a base seed and a salt
/// (splitmix64 finalizer).  Used so that one master seed fans out into
/// reproducible per-purpose seeds (bit streams, noise, init, shuffling).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform variates in [0, 1) with 53-bit resolution on top of mt19937_64.
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next_raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Standard normal variates via Box-Muller on top of mt19937_64.
///
/// std::normal_distribution is implementation-defined, so noise
/// realizations would differ across standard libraries; this sampler pins
/// the exact sequence for a given seed on any conforming platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : uniform_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite; u2 in [0, 1).
    const double u1 = 1.0 - uniform_.next();
    const double u2 = uniform_.next();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  UniformSampler uniform_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Fisher-Yates shuffle driven by UniformSampler, again to keep the
/// permutation sequence identical across standard libraries.
template <typename T>
void shuffle_in_place(std::vector<T>& v, UniformSampler& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_raw() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace opteq
