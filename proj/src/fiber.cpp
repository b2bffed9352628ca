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
#include "opteq/fiber.hpp"

#include "opteq/fft.hpp"
#include "opteq/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace opteq {

void FiberParams::validate() const {
  if (alpha_db_per_km < 0.0) throw std::invalid_argument("fiber: negative attenuation");
  if (span_km <= 0.0) throw std::invalid_argument("fiber: span length must be positive");
  if (n_spans < 0) throw std::invalid_argument("fiber: negative span count");
  if (step_km <= 0.0 || step_km > span_km)
    throw std::invalid_argument("fiber: step must lie in (0, span_km]");
  const double ratio = span_km / step_km;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw std::invalid_argument("fiber: step_km must divide span_km");
  if (carrier_wavelength_nm <= 0.0)
    throw std::invalid_argument("fiber: carrier wavelength must be positive");
  if (gamma_w_km < 0.0) throw std::invalid_argument("fiber: negative nonlinear coefficient");
}

double FiberParams::beta2_s2_per_m() const {
  const double lambda_m = carrier_wavelength_nm * 1e-9;
  const double d_si = dispersion_ps_nm_km * 1e-6;  // ps/(nm km) -> s/m^2
  return -d_si * lambda_m * lambda_m / (2.0 * M_PI * kLightSpeed);
}

double FiberParams::carrier_frequency_hz() const {
  return kLightSpeed / (carrier_wavelength_nm * 1e-9);
}

int FiberParams::steps_per_span() const {
  return static_cast<int>(std::round(span_km / step_km));
}

FiberParams FiberParams::standard_smf() {
  FiberParams p;
  p.alpha_db_per_km = 0.2;
  p.dispersion_ps_nm_km = 17.0;
  p.gamma_w_km = 1.2;
  return p;
}

FiberParams FiberParams::true_wave_classic() {
  FiberParams p;
  p.alpha_db_per_km = 0.23;
  p.dispersion_ps_nm_km = 2.8;
  p.gamma_w_km = 2.5;
  return p;
}

void AmplifierParams::validate() const {
  if (gain_db < 0.0) throw std::invalid_argument("amplifier: gain must be >= 0 dB");
  if (nf_db < 0.0) throw std::invalid_argument("amplifier: noise figure must be >= 0 dB");
  if (carrier_frequency_hz <= 0.0)
    throw std::invalid_argument("amplifier: carrier frequency must be positive");
}

namespace {

void check_waveform(const DualPolWaveform& w, const char* who) {
  if (w.h.size() == 0 || w.h.size() != w.v.size())
    throw std::invalid_argument(std::string(who) + ": polarizations must be non-empty and equal length");
  if (w.sample_rate_hz <= 0.0)
    throw std::invalid_argument(std::string(who) + ": sample rate must be positive");
}

DualPolWaveform padded_to_pow2(const DualPolWaveform& w) {
  const Index n = next_pow2(w.h.size());
  if (n == w.h.size()) return w;
  DualPolWaveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.launch_power_dbm = w.launch_power_dbm;
  out.h = ArrayXc::Zero(n);
  out.v = ArrayXc::Zero(n);
  out.h.head(w.h.size()) = w.h;
  out.v.head(w.v.size()) = w.v;
  return out;
}

}  // namespace

DualPolWaveform ssfm_span(const DualPolWaveform& w, const FiberParams& fiber) {
  check_waveform(w, "ssfm_span");
  fiber.validate();
  if (!w.h.allFinite() || !w.v.allFinite())
    throw std::runtime_error("ssfm_span: non-finite input samples");

  DualPolWaveform out = padded_to_pow2(w);
  const Index n = out.h.size();
  const int n_steps = fiber.steps_per_span();
  const double dz_m = fiber.step_km * 1000.0;
  const double alpha_per_m = fiber.alpha_db_per_km * std::log(10.0) / 10.0 / 1000.0;
  const double beta2 = fiber.beta2_s2_per_m();
  const double gamma_per_w_m =
      fiber.gamma_w_km / 1000.0 * (fiber.manakov_factor ? 8.0 / 9.0 : 1.0);

  const ArrayXr omega = angular_frequency_grid(n, out.sample_rate_hz);
  const ArrayXr omega2 = omega.square();

  // Frequency-domain operator for a linear segment of length L:
  // dispersion phase beta2/2 w^2 L and field attenuation alpha/2 L.
  const auto linear_op = [&](double length_m) -> ArrayXc {
    const ArrayXr phase = 0.5 * beta2 * length_m * omega2;
    const double atten = std::exp(-0.5 * alpha_per_m * length_m);
    return atten * (Complex(0.0, 1.0) * phase.cast<Complex>()).exp();
  };
  const ArrayXc half_step = linear_op(0.5 * dz_m);
  const ArrayXc full_step = linear_op(dz_m);

  Fft fft;
  const auto apply_linear = [&](ArrayXc& field, const ArrayXc& op) {
    ArrayXc spectrum = fft.forward(field);
    spectrum *= op;
    fft.inverse(spectrum, field);
  };

  apply_linear(out.h, half_step);
  apply_linear(out.v, half_step);
  for (int k = 0; k < n_steps; ++k) {
    const ArrayXr phi = gamma_per_w_m * dz_m * (out.h.abs2() + out.v.abs2());
    const ArrayXc rot = (Complex(0.0, 1.0) * phi.cast<Complex>()).exp();
    out.h *= rot;
    out.v *= rot;
    // Adjacent half steps of consecutive segments merge into one full step.
    const ArrayXc& op = (k + 1 < n_steps) ? full_step : half_step;
    apply_linear(out.h, op);
    apply_linear(out.v, op);
  }
  return out;
}

DualPolWaveform amplify_edfa(const DualPolWaveform& w, const AmplifierParams& amp) {
  check_waveform(w, "amplify_edfa");
  amp.validate();

  const double gain = db_to_linear(amp.gain_db);
  DualPolWaveform out = w;
  out.h *= std::sqrt(gain);
  out.v *= std::sqrt(gain);
  if (!amp.enable_ase) return out;

  // S = (G-1) h nu n_sp with n_sp = F G / (2(G-1)) reduces to h nu F G / 2,
  // which is also its continuous extension at G = 1.
  const double nf_linear = db_to_linear(amp.nf_db);
  const double psd = 0.5 * kPlanck * amp.carrier_frequency_hz * nf_linear * gain;
  const double complex_variance = psd * w.sample_rate_hz;
  const double quad_sigma = std::sqrt(0.5 * complex_variance);

  GaussianSampler noise(amp.seed);
  for (Index i = 0; i < out.h.size(); ++i)
    out.h[i] += Complex(quad_sigma * noise.next(), quad_sigma * noise.next());
  for (Index i = 0; i < out.v.size(); ++i)
    out.v[i] += Complex(quad_sigma * noise.next(), quad_sigma * noise.next());
  return out;
}

}  // namespace opteq
