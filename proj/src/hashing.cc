// Copyright 2026 The MPU Sketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpu/hashing.h"

#include <cstring>
#include <string>

#include "mpu/errors.h"

namespace mpu {

uint64_t DigestKey(std::span<const uint8_t> raw) {
  uint64_t state = Mix64(kDigestBasis ^ static_cast<uint64_t>(raw.size()));
  size_t i = 0;
  for (; i + 8 <= raw.size(); i += 8) {
    uint64_t chunk = 0;
    for (int k = 0; k < 8; ++k) {
      chunk |= static_cast<uint64_t>(raw[i + k]) << (8 * k);
    }
    state = Mix64(state ^ chunk);
  }
  if (i < raw.size()) {
    uint64_t chunk = 0;
    for (int k = 0; i + k < raw.size(); ++k) {
      chunk |= static_cast<uint64_t>(raw[i + k]) << (8 * k);
    }
    state = Mix64(state ^ chunk);
  }
  return Mix64(state ^ kDigestFinal);
}

uint64_t DigestKey(std::string_view raw) {
  return DigestKey(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(raw.data()), raw.size()));
}

PairwiseHash::PairwiseHash(uint64_t a, uint64_t b, uint64_t range)
    : a_(a), b_(b), range_(range) {
  if (a == 0 || a >= kMersenne61) {
    throw InvalidArgument("pairwise hash: coefficient a out of [1, P)");
  }
  if (b >= kMersenne61) {
    throw InvalidArgument("pairwise hash: coefficient b out of [0, P)");
  }
  if (range == 0 || range > kMersenne61) {
    throw InvalidArgument("pairwise hash: range must be in [1, P], got " +
                          std::to_string(range));
  }
}

PairwiseHash NewPairwise(HashSeed seed, uint64_t derivation_index,
                         uint64_t range) {
  if (range == 0 || range > kMersenne61) {
    throw InvalidArgument("pairwise hash: range must be in [1, P], got " +
                          std::to_string(range));
  }
  const uint64_t u = DeriveSeed(seed.value, derivation_index);
  uint64_t a = u % kMersenne61;
  if (a == 0) a = 1;
  const uint64_t b = Mix64(u) % kMersenne61;
  return PairwiseHash(a, b, range);
}

}  // namespace mpu
