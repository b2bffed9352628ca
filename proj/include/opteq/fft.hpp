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

#include <unsupported/Eigen/FFT>

#include <stdexcept>

namespace opteq {

/// Thin wrapper around Eigen's FFT that reuses plans across calls.
///
/// Conventions: forward() computes X[k] = sum_n x[n] exp(-i 2 pi k n / N)
/// (no scaling); inverse() applies the 1/N factor, so
/// inverse(forward(x)) == x up to rounding.
class Fft {
 public:
  void forward(const ArrayXc& in, ArrayXc& out) { run(in, out, /*inverse=*/false); }
  void inverse(const ArrayXc& in, ArrayXc& out) { run(in, out, /*inverse=*/true); }

  ArrayXc forward(const ArrayXc& in) {
    ArrayXc out;
    forward(in, out);
    return out;
  }

  ArrayXc inverse(const ArrayXc& in) {
    ArrayXc out;
    inverse(in, out);
    return out;
  }

 private:
  void run(const ArrayXc& in, ArrayXc& out, bool inverse) {
    if (in.size() == 0) throw std::invalid_argument("fft: empty input");
    if (&in == &out) {
      const ArrayXc tmp = in;
      run(tmp, out, inverse);
      return;
    }
    out.resize(in.size());
    const int n = static_cast<int>(in.size());
    if (inverse) {
      impl_.inv(out.data(), in.data(), n);
    } else {
      impl_.fwd(out.data(), in.data(), n);
    }
  }

  Eigen::FFT<double> impl_;
};

/// Angular frequency (rad/s) for each DFT bin in standard FFT order:
/// bins [0, n/2) map to [0, pi*fs) and bins [n/2, n) to [-pi*fs, 0).
ArrayXr angular_frequency_grid(Index n, double sample_rate_hz);

}  // namespace opteq
