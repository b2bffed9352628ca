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
#include <vector>

namespace opteq {

inline constexpr int kQam64BitsPerSymbol = 6;

/// Maps bits to square 64-QAM symbols with unit average power.
///
/// Each symbol consumes 6 bits; the first 3 select the in-phase level and
/// the last 3 the quadrature level.  Levels follow a binary-reflected Gray
/// code over the 8-PAM alphabet {-7,-5,-3,-1,+1,+3,+5,+7}/sqrt(42),
/// MSB first:
///   000 -> -7   001 -> -5   011 -> -3   010 -> -1
///   110 -> +1   111 -> +3   101 -> +5   100 -> +7
///
/// Throws std::invalid_argument if bits.size() is not a multiple of 6 or
/// any entry is not 0/1.
ArrayXc map_qam64(const std::vector<std::uint8_t>& bits);

/// Hard-decision demapper: nearest 8-PAM level per axis, then the inverse
/// Gray labeling of map_qam64.  Output length is 6 * symbols.size().
std::vector<std::uint8_t> demap_qam64_hard(const ArrayXc& symbols);

/// Number of positions where the two bit vectors differ.
/// Throws std::invalid_argument on length mismatch.
std::size_t count_bit_errors(const std::vector<std::uint8_t>& a,
                             const std::vector<std::uint8_t>& b);

}  // namespace opteq
