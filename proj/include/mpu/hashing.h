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

// Seedable pairwise-independent hashing over the Mersenne prime field
// GF(2^61 - 1), plus the 64-bit mixer used for key digests, seed
// derivation, file checksums and the synthetic-trace RNG.
//
// Mixer (splitmix64 step, constants fixed forever):
//
//   Mix64(z): z += 0x9e3779b97f4a7c15
//             z  = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//             z  = (z ^ (z >> 27)) * 0x94d049bb133111eb
//             return z ^ (z >> 31)
//
// DigestKey(bytes) over n bytes:
//
//   state = Mix64(kDigestBasis ^ n)
//   for each 8-byte little-endian chunk (last one zero-padded):
//     state = Mix64(state ^ chunk)
//   return Mix64(state ^ kDigestFinal)
//
// Hash derivation from (seed, index):
//
//   u = Mix64(seed ^ Mix64(index));  a = u mod P, remapped to 1 if 0
//   v = Mix64(u);                    b = v mod P
//
// Evaluation maps a key x to {1..M}:
//
//   y = (a * (x mod P) + b) mod P
//   h(x) = floor(y * M / 2^61) + 1
//
// The final range reduction is a monotone rescaling of the field element,
// so two hashes sharing (a, b) but with ranges M <= M' order keys
// consistently: the range-M hash is a coarsening of the range-M' one.

#ifndef MPU_HASHING_H_
#define MPU_HASHING_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace mpu {

inline constexpr uint64_t kMersenne61 = (uint64_t{1} << 61) - 1;
inline constexpr uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
inline constexpr uint64_t kDigestBasis = 0x6a09e667f3bcc908ULL;
inline constexpr uint64_t kDigestFinal = 0xbb67ae8584caa73bULL;

// Master seed for a family of hashes.
struct HashSeed {
  uint64_t value = 0;
  friend bool operator==(HashSeed, HashSeed) = default;
};

constexpr uint64_t Mix64(uint64_t z) {
  z += kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-seed `index` of `seed`. Used for ensemble copies and Monte-Carlo trials.
constexpr uint64_t DeriveSeed(uint64_t seed, uint64_t index) {
  return Mix64(seed ^ Mix64(index));
}

uint64_t DigestKey(std::span<const uint8_t> raw);
uint64_t DigestKey(std::string_view raw);

// Reduces an arbitrary 64-bit value into [0, 2^61 - 1).
constexpr uint64_t ReduceMersenne61(uint64_t x) {
  uint64_t r = (x & kMersenne61) + (x >> 61);
  return r >= kMersenne61 ? r - kMersenne61 : r;
}

// h(x) = floor(((a*x + b) mod P) * M / 2^61) + 1, with P = 2^61 - 1.
class PairwiseHash {
 public:
  // Direct construction from stored coefficients (used by deserialization).
  // Throws InvalidArgument when the coefficients or range are out of bounds.
  PairwiseHash(uint64_t a, uint64_t b, uint64_t range);

  uint64_t a() const { return a_; }
  uint64_t b() const { return b_; }
  uint64_t range() const { return range_; }

  // Field element (a*x + b) mod P before range reduction.
  uint64_t Residue(uint64_t key) const {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(a_) * ReduceMersenne61(key) + b_;
    uint64_t lo = static_cast<uint64_t>(prod & kMersenne61);
    uint64_t hi = static_cast<uint64_t>(prod >> 61);
    return ReduceMersenne61(lo + hi);
  }

  // 1-based bucket in {1..range}.
  uint64_t Eval(uint64_t key) const { return Bucket(key) + 1; }

  // 0-based bucket in {0..range-1}; Eval(key) - 1.
  uint64_t Bucket(uint64_t key) const {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(Residue(key)) * range_) >> 61);
  }

  friend bool operator==(const PairwiseHash&, const PairwiseHash&) = default;

 private:
  uint64_t a_;
  uint64_t b_;
  uint64_t range_;
};

// Deterministically derives (a, b) from (seed, derivation_index).
// Throws InvalidArgument if range == 0 or range > P.
PairwiseHash NewPairwise(HashSeed seed, uint64_t derivation_index,
                         uint64_t range);

}  // namespace mpu

#endif  // MPU_HASHING_H_
