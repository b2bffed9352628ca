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
#include "opteq/types.hpp"

#include <cstdint>

namespace opteq {

/// Transmitter-side configuration for one dual-polarization signal.
struct TxConfig {
  double baud_rate_gbd = 30.0;
  int sps = 8;                   ///< samples per symbol
  double rolloff = 0.1;          ///< root-raised-cosine roll-off
  int mod_order = 64;            ///< only square 64-QAM is supported
  double launch_power_dbm = 1.0; ///< total power across both polarizations
  int prbs_order = 32;           ///< LFSR register length for the bit source
  int filter_span_symbols = 64;  ///< RRC span; taps = span * sps + 1
  std::uint64_t seed = 1;        ///< per-polarization bit seeds derive from this

  double sample_rate_hz() const { return baud_rate_gbd * 1e9 * sps; }
  void validate() const;
};

/// Shapes both symbol streams with the RRC filter and scales each
/// polarization to exactly half the configured launch power.
DualPolWaveform assemble_waveform(const ArrayXc& symbols_h, const ArrayXc& symbols_v,
                                  const TxConfig& tx);

/// Transmitted symbols and the waveform observed after the last amplifier.
struct LinkOutput {
  ArrayXc tx_h, tx_v;   ///< unit-average-power transmitted symbols
  DualPolWaveform rx;   ///< received waveform, pre-DSP
};

/// End-to-end deterministic link simulation: PRBS bits -> 64-QAM ->
/// RRC shaping -> n_spans x (fiber span + amplifier).  The amplifier gain
/// is set to exactly undo the span loss and each span uses a distinct
/// noise seed derived from amp.seed.  amp.gain_db and
/// amp.carrier_frequency_hz are taken from the fiber parameters; with
/// fiber.n_spans == 0 the received waveform is the shaped transmit signal.
LinkOutput simulate_link(const TxConfig& tx, const FiberParams& fiber,
                         const AmplifierParams& amp, Index n_symbols);

}  // namespace opteq
