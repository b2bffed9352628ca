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
#include "opteq/qam.hpp"

#include <cmath>
#include <stdexcept>

namespace opteq {

namespace {

// sqrt(42) normalizes the 8-PAM grid {+-1,+-3,+-5,+-7} per axis to unit
// average symbol power: E[I^2 + Q^2] = 2 * 21 / 42 = 1.
const double kQam64Scale = 1.0 / std::sqrt(42.0);

// Binary-reflected Gray code: level index i in 0..7 carries label i^(i>>1),
// so adjacent amplitude levels differ in exactly one bit.
int gray_label(int index) { return index ^ (index >> 1); }

int level_index_from_label(int label) {
  // 3-bit inverse Gray: prefix XOR.
  int i = label ^ (label >> 1);
  i ^= i >> 2;
  return i;
}

double level_from_label(int label) {
  return (2.0 * level_index_from_label(label) - 7.0) * kQam64Scale;
}

int label_from_level(double v) {
  int index = static_cast<int>(std::lround((v / kQam64Scale + 7.0) / 2.0));
  if (index < 0) index = 0;
  if (index > 7) index = 7;
  return gray_label(index);
}

int bits_to_label(std::uint8_t b0, std::uint8_t b1, std::uint8_t b2) {
  if (b0 > 1 || b1 > 1 || b2 > 1)
    throw std::invalid_argument("map_qam64: bit values must be 0 or 1");
  return (b0 << 2) | (b1 << 1) | b2;
}

}  // namespace

ArrayXc map_qam64(const std::vector<std::uint8_t>& bits) {
  if (bits.size() % kQam64BitsPerSymbol != 0)
    throw std::invalid_argument("map_qam64: bit count must be a multiple of 6");
  const Index n = static_cast<Index>(bits.size() / kQam64BitsPerSymbol);
  ArrayXc symbols(n);
  for (Index k = 0; k < n; ++k) {
    const std::size_t o = static_cast<std::size_t>(k) * kQam64BitsPerSymbol;
    const double i_level = level_from_label(bits_to_label(bits[o], bits[o + 1], bits[o + 2]));
    const double q_level = level_from_label(bits_to_label(bits[o + 3], bits[o + 4], bits[o + 5]));
    symbols[k] = Complex(i_level, q_level);
  }
  return symbols;
}

std::vector<std::uint8_t> demap_qam64_hard(const ArrayXc& symbols) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbols.size()) * kQam64BitsPerSymbol);
  for (Index k = 0; k < symbols.size(); ++k) {
    const int i_label = label_from_level(symbols[k].real());
    const int q_label = label_from_level(symbols[k].imag());
    const std::size_t o = static_cast<std::size_t>(k) * kQam64BitsPerSymbol;
    bits[o] = static_cast<std::uint8_t>((i_label >> 2) & 1);
    bits[o + 1] = static_cast<std::uint8_t>((i_label >> 1) & 1);
    bits[o + 2] = static_cast<std::uint8_t>(i_label & 1);
    bits[o + 3] = static_cast<std::uint8_t>((q_label >> 2) & 1);
    bits[o + 4] = static_cast<std::uint8_t>((q_label >> 1) & 1);
    bits[o + 5] = static_cast<std::uint8_t>(q_label & 1);
  }
  return bits;
}

std::size_t count_bit_errors(const std::vector<std::uint8_t>& a,
                             const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("count_bit_errors: length mismatch");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0) != (b[i] != 0)) ++errors;
  }
  return errors;
}

}  // namespace opteq
