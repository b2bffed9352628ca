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

#include "opteq/fft.hpp"
#include "opteq/prbs.hpp"
#include "opteq/qam.hpp"

#include <doctest.h>

#include <cmath>

using namespace opteq;

namespace {

/// O(n^2) circular convolution with the kernel laid out the way the
/// filter expects it: center tap at index 0, right half at the head,
/// left half wrapped to the tail.
ArrayXc circular_convolve_reference(const ArrayXc& x, const ArrayXr& kernel_wrapped) {
  const Index n = x.size();
  ArrayXc y = ArrayXc::Zero(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) y[i] += kernel_wrapped[j] * x[((i - j) % n + n) % n];
  return y;
}

ArrayXr wrap_kernel(const ArrayXr& taps, Index n) {
  const Index center = (taps.size() - 1) / 2;
  ArrayXr wrapped = ArrayXr::Zero(n);
  for (Index i = 0; i < taps.size(); ++i) {
    const Index shift = i - center;  // tap offset relative to the center
    wrapped[((shift % n) + n) % n] = taps[i];
  }
  return wrapped;
}

}  // namespace

TEST_CASE("tap vector is odd, symmetric, and unit energy") {
  const ArrayXr taps = rrc_taps(8, 0.1, 64);
  REQUIRE(taps.size() == 64 * 8 + 1);
  for (Index i = 0; i < taps.size(); ++i)
    CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]).epsilon(1e-14));
  CHECK(taps.square().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(taps[(taps.size() - 1) / 2] > 0.0);  // main lobe peak at the center

  CHECK_THROWS_AS(rrc_taps(8, -0.1, 64), std::invalid_argument);
  CHECK_THROWS_AS(rrc_taps(8, 1.5, 64), std::invalid_argument);
  CHECK_THROWS_AS(rrc_taps(0, 0.1, 64), std::invalid_argument);
  CHECK_THROWS_AS(rrc_taps(8, 0.1, 0), std::invalid_argument);
}

TEST_CASE("zero stuffing places symbols on the sample grid") {
  ArrayXc syms(3);
  syms << Complex(1, 1), Complex(-2, 0), Complex(0, 3);
  const ArrayXc up = upsample_zero_stuff(syms, 4);
  REQUIRE(up.size() == 12);
  for (Index k = 0; k < 3; ++k) CHECK(up[4 * k] == syms[k]);
  CHECK(up.abs2().sum() == doctest::Approx(syms.abs2().sum()));
}

TEST_CASE("frequency-domain filtering matches direct circular convolution") {
  Fft fft;
  ArrayXc x(64);
  {
    // deterministic pseudo-random payload
    const auto bits = generate_prbs(15, 64 * 6, 11);
    x = map_qam64(bits);
  }
  const ArrayXr taps = rrc_taps(2, 0.25, 4);  // 9 taps
  const ArrayXc fast = filter_zero_phase_circular(x, taps, fft);
  const ArrayXc slow = circular_convolve_reference(x, wrap_kernel(taps, 64));
  REQUIRE(fast.size() == 64);
  CHECK((fast - slow).abs().maxCoeff() < 1e-12);
}

TEST_CASE("non power-of-two inputs are padded, filtered, and truncated") {
  Fft fft;
  const auto bits = generate_prbs(15, 60 * 6, 13);
  const ArrayXc x = map_qam64(bits);
  const ArrayXr taps = rrc_taps(2, 0.25, 4);

  ArrayXc padded = ArrayXc::Zero(64);
  padded.head(60) = x;
  const ArrayXc expect = circular_convolve_reference(padded, wrap_kernel(taps, 64)).head(60);
  const ArrayXc got = filter_zero_phase_circular(x, taps, fft);
  REQUIRE(got.size() == 60);
  CHECK((got - expect).abs().maxCoeff() < 1e-12);
}

TEST_CASE("a single-tap unit kernel is the identity") {
  Fft fft;
  const ArrayXc x = map_qam64(generate_prbs(15, 32 * 6, 17));
  ArrayXr delta(1);
  delta << 1.0;
  CHECK((filter_zero_phase_circular(x, delta, fft) - x).abs().maxCoeff() < 1e-12);
}

TEST_CASE("matched transmit/receive pair is free of intersymbol interference") {
  // shaping twice with the root filter yields the raised-cosine response,
  // which is Nyquist: downsampling recovers the symbols, up to the ISI
  // left by truncating the tap tails at a finite span
  const int sps = 4;
  const ArrayXc syms = map_qam64(generate_prbs(23, 128 * 6, 19));
  Fft fft;

  const auto worst_isi = [&](int span_symbols) {
    const ArrayXc shaped = shape_rrc(syms, sps, 0.1, span_symbols);
    REQUIRE(shaped.size() == 128 * sps);  // power of two: filtering is exactly circular
    const ArrayXr taps = rrc_taps(sps, 0.1, span_symbols);
    const ArrayXc matched = filter_zero_phase_circular(shaped, taps, fft);
    double worst = 0.0;
    for (Index k = 0; k < syms.size(); ++k)
      worst = std::max(worst, std::abs(matched[k * sps] - syms[k]));
    return worst;
  };

  const double short_span = worst_isi(16);
  const double long_span = worst_isi(64);
  CHECK(long_span < 5e-3);                 // small at the working span
  CHECK(long_span < 0.1 * short_span);     // and set by truncation alone
}

TEST_CASE("shaped spectrum is confined to the roll-off band") {
  const int sps = 8;
  const double rolloff = 0.1;
  const ArrayXc syms = map_qam64(generate_prbs(23, 256 * 6, 23));
  const ArrayXc shaped = shape_rrc(syms, sps, rolloff, 64);

  Fft fft;
  const ArrayXc spectrum = fft.forward(shaped);
  // with a unit symbol rate the band edge sits at (1 + rolloff) / 2
  const ArrayXr omega = angular_frequency_grid(spectrum.size(), static_cast<double>(sps));
  const double edge = 2.0 * M_PI * (1.0 + rolloff) / 2.0;
  double in_band = 0.0, out_of_band = 0.0;
  for (Index k = 0; k < spectrum.size(); ++k) {
    const double e = std::norm(spectrum[k]);
    (std::abs(omega[k]) <= edge ? in_band : out_of_band) += e;
  }
  CHECK(out_of_band / (in_band + out_of_band) < 1e-4);
}
