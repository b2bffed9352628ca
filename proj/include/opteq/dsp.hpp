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

#include "opteq/fiber.hpp"
#include "opteq/txsim.hpp"
#include "opteq/types.hpp"

#include <utility>

namespace opteq {

/// Transmit and linearly equalized receive symbols for both polarizations.
struct SymbolBlock {
  ArrayXc tx_h, tx_v;
  ArrayXc rx_h, rx_v;
  double launch_power_dbm = 0.0;
};

struct QualityMetrics {
  double ber = 0.0;
  double q_db = 0.0;
  std::size_t n_bits = 0;
};

/// Frequency-domain chromatic dispersion compensation over the full link
/// length: multiplies the spectrum by exp(-i beta2/2 w^2 L_total), exactly
/// undoing the dispersion phase accumulated across all spans (attenuation
/// and gain are not touched).  Lengths that are not a power of two are
/// padded for the transform and truncated back.
DualPolWaveform cdc_frequency_domain(const DualPolWaveform& w, const FiberParams& fiber);

/// Matched (same RRC as the transmitter, zero-phase) filter followed by
/// symbol-rate decimation at sample offsets delay_samples + k*sps.
/// Returns floor(len / sps) symbols per polarization; trailing symbols may
/// stem from internal padding, so callers truncate to the transmitted count.
std::pair<ArrayXc, ArrayXc> matched_filter_downsample(const DualPolWaveform& w,
                                                      const TxConfig& tx,
                                                      Index delay_samples = 0);

/// Least-squares single-tap normalization: the complex K minimizing
/// ||K rx - tx||^2, i.e. K = <tx, rx> / ||rx||^2 with the inner product
/// conjugate-linear in rx.  Returns (K * rx, K).
std::pair<ArrayXc, Complex> normalize_kdsp(const ArrayXc& rx, const ArrayXc& tx);

/// Hard-decision bit error ratio between received and reference symbols
/// under the 64-QAM labeling of map_qam64.
double compute_ber(const ArrayXc& rx_symbols, const ArrayXc& tx_symbols);

/// Inverse complementary error function by bisection on std::erfc;
/// defined for y in (0, 2).
double erfc_inv(double y);

/// Gaussian-equivalent quality factor: q_db = 20 log10(sqrt(2) erfcinv(2 ber)).
/// Finite only for ber in (0, 0.5); returns +inf for ber <= 0 and -inf at 0.5+.
double ber_to_q_db(double ber);
double q_db_to_ber(double q_db);

QualityMetrics measure_quality(const ArrayXc& rx_symbols, const ArrayXc& tx_symbols);

/// Full linear receiver: CDC, matched filter, decimation, truncation to the
/// transmitted symbol count, and per-polarization K normalization.
SymbolBlock linear_equalize(const DualPolWaveform& rx, const ArrayXc& tx_h,
                            const ArrayXc& tx_v, const TxConfig& tx_cfg,
                            const FiberParams& fiber);

/// Exact symmetries of the dual-polarization channel and linear receiver.
/// Each maps a valid (tx, rx) symbol block to another equally valid one:
/// the propagation model treats both polarizations identically, is
/// equivariant under a global phase rotation, and (with circular boundary
/// conditions and a symmetric pulse) under time reversal.  A rotation by
/// any integer power of i additionally maps the square QAM grid onto
/// itself, so all three are used to enlarge equalizer training sets
/// without running additional simulations.
SymbolBlock swap_polarizations(const SymbolBlock& block);
SymbolBlock rotate_phase(const SymbolBlock& block, Complex factor);
SymbolBlock reverse_time(const SymbolBlock& block);

}  // namespace opteq
