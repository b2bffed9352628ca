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
#include "opteq/txsim.hpp"

#include "opteq/prbs.hpp"
#include "opteq/qam.hpp"
#include "opteq/rng.hpp"
#include "opteq/rrc.hpp"

#include <cmath>
#include <stdexcept>

namespace opteq {

void TxConfig::validate() const {
  if (baud_rate_gbd <= 0.0) throw std::invalid_argument("tx: baud rate must be positive");
  if (sps < 2) throw std::invalid_argument("tx: need at least 2 samples per symbol");
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("tx: rolloff outside [0, 1]");
  if (mod_order != 64) throw std::invalid_argument("tx: only 64-QAM is supported");
  if (filter_span_symbols < 1) throw std::invalid_argument("tx: filter span must be >= 1");
}

DualPolWaveform assemble_waveform(const ArrayXc& symbols_h, const ArrayXc& symbols_v,
                                  const TxConfig& tx) {
  tx.validate();
  if (symbols_h.size() == 0 || symbols_h.size() != symbols_v.size())
    throw std::invalid_argument("assemble_waveform: polarizations must be non-empty and equal length");

  DualPolWaveform w;
  w.sample_rate_hz = tx.sample_rate_hz();
  w.launch_power_dbm = tx.launch_power_dbm;
  w.h = shape_rrc(symbols_h, tx.sps, tx.rolloff, tx.filter_span_symbols);
  w.v = shape_rrc(symbols_v, tx.sps, tx.rolloff, tx.filter_span_symbols);

  const double per_pol_watts = 0.5 * dbm_to_watts(tx.launch_power_dbm);
  w.h *= std::sqrt(per_pol_watts / mean_power(w.h));
  w.v *= std::sqrt(per_pol_watts / mean_power(w.v));
  return w;
}

LinkOutput simulate_link(const TxConfig& tx, const FiberParams& fiber,
                         const AmplifierParams& amp, Index n_symbols) {
  tx.validate();
  fiber.validate();
  amp.validate();
  if (n_symbols <= 0) throw std::invalid_argument("simulate_link: n_symbols must be positive");

  const std::size_t n_bits =
      static_cast<std::size_t>(n_symbols) * kQam64BitsPerSymbol;
  LinkOutput out;
  out.tx_h = map_qam64(generate_prbs(tx.prbs_order, n_bits, mix_seed(tx.seed, 1)));
  out.tx_v = map_qam64(generate_prbs(tx.prbs_order, n_bits, mix_seed(tx.seed, 2)));
  out.rx = assemble_waveform(out.tx_h, out.tx_v, tx);

  AmplifierParams span_amp = amp;
  span_amp.gain_db = fiber.alpha_db_per_km * fiber.span_km;
  span_amp.carrier_frequency_hz = fiber.carrier_frequency_hz();
  for (int span = 0; span < fiber.n_spans; ++span) {
    out.rx = ssfm_span(out.rx, fiber);
    span_amp.seed = mix_seed(amp.seed, 1000 + static_cast<std::uint64_t>(span));
    out.rx = amplify_edfa(out.rx, span_amp);
  }
  return out;
}

}  // namespace opteq
