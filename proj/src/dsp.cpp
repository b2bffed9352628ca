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
#include "opteq/dsp.hpp"

#include "opteq/fft.hpp"
#include "opteq/qam.hpp"
#include "opteq/rrc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace opteq {

DualPolWaveform cdc_frequency_domain(const DualPolWaveform& w, const FiberParams& fiber) {
  if (w.h.size() == 0 || w.h.size() != w.v.size())
    throw std::invalid_argument("cdc: polarizations must be non-empty and equal length");
  if (w.sample_rate_hz <= 0.0) throw std::invalid_argument("cdc: sample rate must be positive");
  fiber.validate();

  const Index n0 = w.h.size();
  const Index n = next_pow2(n0);
  const double length_m = fiber.span_km * 1000.0 * fiber.n_spans;
  const ArrayXr omega = angular_frequency_grid(n, w.sample_rate_hz);
  const ArrayXc op =
      (Complex(0.0, -1.0) * (0.5 * fiber.beta2_s2_per_m() * length_m * omega.square()).cast<Complex>())
          .exp();

  Fft fft;
  DualPolWaveform out = w;
  for (ArrayXc* field : {&out.h, &out.v}) {
    ArrayXc padded = ArrayXc::Zero(n);
    padded.head(n0) = *field;
    ArrayXc spectrum = fft.forward(padded);
    spectrum *= op;
    fft.inverse(spectrum, padded);
    *field = padded.head(n0);
  }
  return out;
}

std::pair<ArrayXc, ArrayXc> matched_filter_downsample(const DualPolWaveform& w,
                                                      const TxConfig& tx,
                                                      Index delay_samples) {
  tx.validate();
  if (w.h.size() == 0 || w.h.size() != w.v.size())
    throw std::invalid_argument("matched_filter: polarizations must be non-empty and equal length");
  if (delay_samples < 0 || delay_samples >= w.h.size())
    throw std::invalid_argument("matched_filter: delay outside waveform");

  const ArrayXr taps = rrc_taps(tx.sps, tx.rolloff, tx.filter_span_symbols);
  Fft fft;
  const ArrayXc fh = filter_zero_phase_circular(w.h, taps, fft);
  const ArrayXc fv = filter_zero_phase_circular(w.v, taps, fft);

  const Index n_out = w.h.size() / tx.sps;
  ArrayXc sh(n_out), sv(n_out);
  for (Index k = 0; k < n_out; ++k) {
    const Index i = (delay_samples + k * tx.sps) % w.h.size();
    sh[k] = fh[i];
    sv[k] = fv[i];
  }
  return {sh, sv};
}

std::pair<ArrayXc, Complex> normalize_kdsp(const ArrayXc& rx, const ArrayXc& tx) {
  if (rx.size() == 0 || rx.size() != tx.size())
    throw std::invalid_argument("normalize_kdsp: sequences must be non-empty and equal length");
  const double denom = rx.abs2().sum();
  if (denom <= 0.0) throw std::invalid_argument("normalize_kdsp: zero-power input");
  const Complex k = (tx * rx.conjugate()).sum() / denom;
  return {k * rx, k};
}

double compute_ber(const ArrayXc& rx_symbols, const ArrayXc& tx_symbols) {
  if (rx_symbols.size() == 0 || rx_symbols.size() != tx_symbols.size())
    throw std::invalid_argument("compute_ber: sequences must be non-empty and equal length");
  const std::size_t errors =
      count_bit_errors(demap_qam64_hard(rx_symbols), demap_qam64_hard(tx_symbols));
  return static_cast<double>(errors) /
         (static_cast<double>(rx_symbols.size()) * kQam64BitsPerSymbol);
}

double erfc_inv(double y) {
  if (!(y > 0.0 && y < 2.0)) throw std::invalid_argument("erfc_inv: argument outside (0, 2)");
  if (y == 1.0) return 0.0;
  if (y > 1.0) return -erfc_inv(2.0 - y);

  // erfc is strictly decreasing; bisection on [0, 30] covers y down to
  // the smallest positive normals and converges below 1 ulp.
  double lo = 0.0, hi = 30.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double ber_to_q_db(double ber) {
  if (ber <= 0.0) return std::numeric_limits<double>::infinity();
  if (ber >= 1.0) throw std::invalid_argument("ber_to_q_db: ber must be < 1");
  if (ber >= 0.5) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(std::sqrt(2.0) * erfc_inv(2.0 * ber));
}

double q_db_to_ber(double q_db) {
  const double q = std::pow(10.0, q_db / 20.0);
  return 0.5 * std::erfc(q / std::sqrt(2.0));
}

QualityMetrics measure_quality(const ArrayXc& rx_symbols, const ArrayXc& tx_symbols) {
  QualityMetrics m;
  m.ber = compute_ber(rx_symbols, tx_symbols);
  m.q_db = ber_to_q_db(m.ber);
  m.n_bits = static_cast<std::size_t>(rx_symbols.size()) * kQam64BitsPerSymbol;
  return m;
}

SymbolBlock linear_equalize(const DualPolWaveform& rx, const ArrayXc& tx_h,
                            const ArrayXc& tx_v, const TxConfig& tx_cfg,
                            const FiberParams& fiber) {
  if (tx_h.size() == 0 || tx_h.size() != tx_v.size())
    throw std::invalid_argument("linear_equalize: transmit symbol blocks must match");
  const DualPolWaveform compensated = cdc_frequency_domain(rx, fiber);
  auto [sh, sv] = matched_filter_downsample(compensated, tx_cfg);
  if (sh.size() < tx_h.size())
    throw std::invalid_argument("linear_equalize: waveform shorter than transmit block");

  SymbolBlock block;
  block.launch_power_dbm = rx.launch_power_dbm;
  block.tx_h = tx_h;
  block.tx_v = tx_v;
  block.rx_h = normalize_kdsp(sh.head(tx_h.size()), tx_h).first;
  block.rx_v = normalize_kdsp(sv.head(tx_v.size()), tx_v).first;
  return block;
}

SymbolBlock swap_polarizations(const SymbolBlock& block) {
  SymbolBlock out = block;
  std::swap(out.tx_h, out.tx_v);
  std::swap(out.rx_h, out.rx_v);
  return out;
}

SymbolBlock rotate_phase(const SymbolBlock& block, Complex factor) {
  SymbolBlock out = block;
  out.tx_h *= factor;
  out.tx_v *= factor;
  out.rx_h *= factor;
  out.rx_v *= factor;
  return out;
}

SymbolBlock reverse_time(const SymbolBlock& block) {
  SymbolBlock out = block;
  out.tx_h = block.tx_h.reverse().eval();
  out.tx_v = block.tx_v.reverse().eval();
  out.rx_h = block.rx_h.reverse().eval();
  out.rx_v = block.rx_v.reverse().eval();
  return out;
}

}  // namespace opteq
