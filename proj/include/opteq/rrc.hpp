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

#include "opteq/fft.hpp"
#include "opteq/types.hpp"

namespace opteq {

/// Root-raised-cosine taps: span_symbols * sps + 1 coefficients, symmetric
/// about the center tap, normalized to unit energy.  rolloff in [0, 1]
/// (rolloff 0 degenerates to a truncated sinc).
///
/// Throws std::invalid_argument for sps < 1, odd requirements violated
/// (span_symbols < 1) or rolloff outside [0, 1].
ArrayXr rrc_taps(int sps, double rolloff, int span_symbols);

/// Inserts sps-1 zeros after every symbol: out[k*sps] = symbols[k].
ArrayXc upsample_zero_stuff(const ArrayXc& symbols, int sps);

/// Circular zero-phase FIR filtering.
///
/// The symmetric taps are applied with their center aligned to lag zero,
/// so the output has no group delay: sample n of the output depends on
/// samples n-H..n+H of the (circularly extended) input.  If x.size() is a
/// power of two the convolution is exactly circular; otherwise the input
/// is zero-padded to the next power of two and the result truncated back,
/// which approximates linear convolution at the block edges.
///
/// Throws std::invalid_argument if the padded length is shorter than the
/// filter or taps.size() is even.
ArrayXc filter_zero_phase_circular(const ArrayXc& x, const ArrayXr& taps, Fft& fft);

/// Upsamples symbols by sps and applies the RRC taps (zero-phase), so the
/// k-th symbol peaks at sample k*sps of the returned waveform.  The output
/// length always equals symbols.size() * sps.  No power scaling is applied.
ArrayXc shape_rrc(const ArrayXc& symbols, int sps, double rolloff, int span_symbols);

}  // namespace opteq
