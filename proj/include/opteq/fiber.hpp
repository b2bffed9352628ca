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

#include <cstdint>

namespace opteq {

/// Parameters of one fiber span plus the multi-span link layout.
struct FiberParams {
  double alpha_db_per_km = 0.2;       ///< power attenuation
  double dispersion_ps_nm_km = 17.0;  ///< chromatic dispersion D
  double gamma_w_km = 1.2;            ///< Kerr nonlinearity, 1/(W*km)
  double span_km = 50.0;
  int n_spans = 20;
  double step_km = 1.0;               ///< split-step size; must divide span_km
  double carrier_wavelength_nm = 1550.0;
  bool manakov_factor = true;         ///< scale gamma by 8/9 in the nonlinear step

  void validate() const;

  /// Group-velocity dispersion beta2 = -D lambda^2 / (2 pi c) in s^2/m.
  double beta2_s2_per_m() const;
  double carrier_frequency_hz() const;
  int steps_per_span() const;

  /// Standard single-mode fiber preset.
  static FiberParams standard_smf();
  /// Low-dispersion, high-nonlinearity fiber preset.
  static FiberParams true_wave_classic();
};

/// Lumped amplifier: flat gain plus optional white Gaussian noise loading.
struct AmplifierParams {
  double gain_db = 10.0;
  double nf_db = 4.5;
  bool enable_ase = true;
  double carrier_frequency_hz = kLightSpeed / 1550e-9;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Two co-propagating polarization tributaries on a common sample grid.
struct DualPolWaveform {
  ArrayXc h, v;
  double sample_rate_hz = 0.0;
  double launch_power_dbm = 0.0;
};

/// Propagates the waveform through one fiber span with the symmetric
/// split-step method: a half linear step, then alternating full nonlinear
/// and full linear steps, closed by a final half linear step (adjacent
/// half steps merged).  The linear step applies
/// exp(i beta2/2 w^2 dz - alpha/2 dz) in the frequency domain; the
/// nonlinear step rotates both polarizations by
/// phi = (8/9) gamma (|h|^2 + |v|^2) dz (the 8/9 factor controlled by
/// FiberParams::manakov_factor).
///
/// If the input length is not a power of two it is zero-padded to the next
/// power of two and the padded length is returned; dispersion legitimately
/// spreads energy into the padding, so callers should strip padding only
/// after symbol-rate decimation.
///
/// Throws std::invalid_argument on invalid parameters or empty/mismatched
/// inputs and std::runtime_error if the input contains non-finite samples.
DualPolWaveform ssfm_span(const DualPolWaveform& w, const FiberParams& fiber);

/// Applies flat field gain sqrt(G) and, when enabled, adds circular
/// complex Gaussian noise of power spectral density
/// S = (G - 1) h nu n_sp per polarization, with n_sp = F G / (2 (G - 1))
/// for linear noise figure F (the product simplifies to h nu F G / 2,
/// which is also its well-defined G -> 1 limit).  The per-sample complex
/// variance is S * sample_rate.
DualPolWaveform amplify_edfa(const DualPolWaveform& w, const AmplifierParams& amp);

}  // namespace opteq
