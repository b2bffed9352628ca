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
#include "opteq/rrc.hpp"

#include <cmath>
#include <stdexcept>

namespace opteq {

namespace {

// Root-raised-cosine impulse response at time t (in symbol periods).
double rrc_value(double t, double beta) {
  if (std::abs(t) < 1e-12) {
    return 1.0 - beta + 4.0 * beta / M_PI;
  }
  // The generic expression has a removable singularity at |t| = 1/(4*beta).
  const double x = 4.0 * beta * t;
  if (std::abs(1.0 - x * x) < 1e-9) {
    const double a = M_PI / (4.0 * beta);
    return (beta / std::sqrt(2.0)) *
           ((1.0 + 2.0 / M_PI) * std::sin(a) + (1.0 - 2.0 / M_PI) * std::cos(a));
  }
  const double num = std::sin(M_PI * t * (1.0 - beta)) +
                     4.0 * beta * t * std::cos(M_PI * t * (1.0 + beta));
  const double den = M_PI * t * (1.0 - x * x);
  return num / den;
}

}  // namespace

ArrayXr rrc_taps(int sps, double rolloff, int span_symbols) {
  if (sps < 1) throw std::invalid_argument("rrc_taps: sps must be >= 1");
  if (span_symbols < 1) throw std::invalid_argument("rrc_taps: span must be >= 1 symbol");
  if (rolloff < 0.0 || rolloff > 1.0)
    throw std::invalid_argument("rrc_taps: rolloff must lie in [0, 1]");

  const Index half = static_cast<Index>(span_symbols) * sps / 2;
  const Index n_taps = 2 * half + 1;
  ArrayXr taps(n_taps);
  for (Index i = 0; i < n_taps; ++i) {
    const double t = static_cast<double>(i - half) / sps;
    taps[i] = rrc_value(t, rolloff);
  }
  return taps / std::sqrt(taps.square().sum());
}

ArrayXc upsample_zero_stuff(const ArrayXc& symbols, int sps) {
  if (sps < 1) throw std::invalid_argument("upsample_zero_stuff: sps must be >= 1");
  ArrayXc out = ArrayXc::Zero(symbols.size() * sps);
  for (Index k = 0; k < symbols.size(); ++k) out[k * sps] = symbols[k];
  return out;
}

ArrayXc filter_zero_phase_circular(const ArrayXc& x, const ArrayXr& taps, Fft& fft) {
  if (taps.size() % 2 == 0)
    throw std::invalid_argument("filter_zero_phase_circular: taps must have odd length");
  const Index n0 = x.size();
  const Index n = next_pow2(n0);
  if (n < taps.size())
    throw std::invalid_argument("filter_zero_phase_circular: input shorter than filter");

  // Kernel with the center tap at index 0 so the filter contributes no
  // group delay: right half at the head, left half wrapped to the tail.
  const Index half = taps.size() / 2;
  ArrayXc kernel = ArrayXc::Zero(n);
  for (Index i = 0; i <= half; ++i) kernel[i] = taps[half + i];
  for (Index i = 1; i <= half; ++i) kernel[n - i] = taps[half - i];

  ArrayXc xpad = ArrayXc::Zero(n);
  xpad.head(n0) = x;

  const ArrayXc spectrum = fft.forward(xpad) * fft.forward(kernel);
  ArrayXc y = fft.inverse(spectrum);
  return (n == n0) ? y : ArrayXc(y.head(n0));
}

ArrayXc shape_rrc(const ArrayXc& symbols, int sps, double rolloff, int span_symbols) {
  if (symbols.size() == 0) throw std::invalid_argument("shape_rrc: empty symbol block");
  const ArrayXr taps = rrc_taps(sps, rolloff, span_symbols);
  const ArrayXc upsampled = upsample_zero_stuff(symbols, sps);
  Fft fft;
  return filter_zero_phase_circular(upsampled, taps, fft);
}

}  // namespace opteq
