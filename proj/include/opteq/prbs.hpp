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

#include <cstdint>
#include <vector>

namespace opteq {

/// Pseudo-random bit sequence from a Fibonacci LFSR.
///
/// Supported register lengths and feedback polynomials (primitive, so the
/// sequence period is 2^order - 1):
///   7:  x^7  + x^6  + 1
///   15: x^15 + x^14 + 1
///   23: x^23 + x^18 + 1
///   31: x^31 + x^28 + 1
///   32: x^32 + x^22 + x^2 + x + 1
///
/// The seed is XORed into the all-ones initial register state; a zero
/// state would lock the generator, so if the XOR yields zero the state
/// falls back to all-ones.  The register holds the most recent `order`
/// output bits and each step emits the XOR of the tap bits, i.e. the
/// output satisfies s[n] = XOR of s[n - t] over the taps t.
///
/// Throws std::invalid_argument for unsupported orders or n_bits == 0.
std::vector<std::uint8_t> generate_prbs(int order, std::size_t n_bits, std::uint64_t seed);

}  // namespace opteq
