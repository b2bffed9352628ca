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
#include "opteq/prbs.hpp"

#include <stdexcept>
#include <string>

namespace opteq {

namespace {

// Tap positions (1-based exponents) for the primitive feedback polynomials.
std::vector<int> taps_for_order(int order) {
  switch (order) {
    case 7:
      return {7, 6};
    case 15:
      return {15, 14};
    case 23:
      return {23, 18};
    case 31:
      return {31, 28};
    case 32:
      return {32, 22, 2, 1};
    default:
      throw std::invalid_argument("generate_prbs: unsupported register length " +
                                  std::to_string(order));
  }
}

}  // namespace

std::vector<std::uint8_t> generate_prbs(int order, std::size_t n_bits, std::uint64_t seed) {
  const std::vector<int> taps = taps_for_order(order);
  if (n_bits == 0) throw std::invalid_argument("generate_prbs: n_bits must be positive");

  // Register bit (t-1) holds the output emitted t steps ago, so the next
  // output is s[n] = XOR of s[n - t] over the polynomial taps t.
  const std::uint64_t mask = (1ULL << order) - 1;
  std::uint64_t state = (mask ^ seed) & mask;
  if (state == 0) state = mask;  // the zero state never leaves itself

  std::vector<std::uint8_t> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    std::uint64_t feedback = 0;
    for (int t : taps) feedback ^= (state >> (t - 1)) & 1ULL;
    bits[i] = static_cast<std::uint8_t>(feedback);
    state = ((state << 1) | feedback) & mask;
  }
  return bits;
}

}  // namespace opteq
