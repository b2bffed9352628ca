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

#include "opteq/dsp.hpp"
#include "opteq/mlp.hpp"
#include "opteq/quant.hpp"

#include <cstdint>
#include <string>

namespace opteq {

/// Model container (.mlpz), little-endian throughout:
///
///   bytes  field
///   4      magic "MLPZ"
///   2      u16 format version (1)
///   2      u16 variant: 1 dense fp32, 2 dense int8, 3 sparse int8
///   4      u32 n_layers
///   4*(L+1) u32 layer widths dims[0..L]
///   3      u8 bit widths {input, activation, weight}
///   L-1    u8 hidden activation codes (0 tanh, 1 identity)
///
/// followed by the variant payload (matrices in column-major storage
/// order, bitmaps packed LSB-first in storage order):
///
///   dense fp32:  u8 has_masks; per layer f32 weights; if has_masks,
///                per layer a keep-bitmap of ceil(count/8) bytes.
///   dense int8:  per layer { f64 weight scale; i8 weights }, then
///                f64 activation scales (L-1), f64 range lo/hi pairs
///                (L+1 boundaries), f64 recorded sparsity.
///   sparse int8: per layer { f64 weight scale; u64 nonzero count;
///                nonzero-bitmap of ceil(count/8) bytes; i8 nonzero
///                values in storage order }, then scales/ranges/
///                sparsity as dense int8.
///
/// Dataset container (.wfm waveforms, .sym symbol blocks):
///
///   bytes  field
///   8      magic "OPTQDATA"
///   4      u32 format version (1)
///   4      u32 kind: 1 waveform, 2 symbol block
///   8      u64 n_symbols
///   4      u32 samples per symbol (1 for symbol blocks)
///   8      f64 sample rate in Hz
///   8      f64 launch power in dBm
///   then interleaved complex64 (f32 re, f32 im) frames:
///   waveform: n_symbols * sps frames of (h, v)
///   symbols:  n_symbols frames of (tx_h, tx_v, rx_h, rx_v)
///
/// All loaders validate magic, version, kind and payload length and throw
/// std::runtime_error on mismatch or truncation.

void save_model_fp32(const std::string& path, const MlpModel& model);
MlpModel load_model_fp32(const std::string& path);

/// Dense (sparse = false) or bitmap-sparse (sparse = true) INT8 container.
void save_model_int8(const std::string& path, const QuantizedModel& model, bool sparse);
QuantizedModel load_model_int8(const std::string& path);

/// Size in bytes of a model container; validates magic and version first.
std::uint64_t model_file_size(const std::string& path);

void save_waveform(const std::string& path, const DualPolWaveform& w, Index n_symbols, int sps);
DualPolWaveform load_waveform(const std::string& path, Index* n_symbols = nullptr,
                              int* sps = nullptr);

void save_symbols(const std::string& path, const SymbolBlock& block, double sample_rate_hz);
SymbolBlock load_symbols(const std::string& path);

}  // namespace opteq
