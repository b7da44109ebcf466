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

// Multiplexed proportional-union (MPU) sketch.
//
// A p x m x s array of small counters shared by every flow. Flow i owns one
// row in each of the p blocks, chosen by h_k(i); a time slot t selects
// column g(t) and carries the value phi(t) in {1..w}. Counters start at the
// sentinel w+1 and only ever take minima, so the final state is a pure
// function of the set of (flow, slot) pairs seen.
//
// Slots (and typed items) are small consecutive integers, and a linear hash
// of consecutive integers is a lattice: loads per column are far too even
// and phi almost never ties. Items therefore pass through Mix64 before g
// and phi, the same pre-digest flow IDs get. Mix64 is a bijection, so g and
// phi stay pairwise independent.
//
// Estimating the co-activity of flows i and j scans all s columns of the 2p
// rows the two flows own. Per column, with mn/mx the min/max of those 2p
// counters:
//
//   a += (mn == mx)      agreement
//   b += (mn <= w)       column touched by either flow
//   c += mn
//
// and the estimate is w * a * b / c. Counter values are phi's continuous
// uniform draws scaled by w, so the factor w restores count units. The
// estimate is 0 when b == 0.
//
// Layout is row-major with the block index outermost:
//   index(k, r, l) = (k * m + r) * s + l        (all 0-based)
//
// Thread-safety: one writer at a time. Estimate() and Save() only read and
// may run concurrently with each other but not with Update()/Merge().

#ifndef MPU_SKETCH_H_
#define MPU_SKETCH_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <variant>
#include <vector>

#include "mpu/hashing.h"
#include "mpu/rational.h"

namespace mpu {

inline constexpr uint64_t kUnboundedEpoch = std::numeric_limits<uint64_t>::max();
inline constexpr uint64_t kDefaultSketchMemoryCap = uint64_t{1} << 32;  // 4 GiB

struct MpuParams {
  uint64_t p = 1;  // blocks
  uint64_t m = 1;  // rows per block
  uint64_t s = 1;  // columns per row
  uint64_t w = 1;  // range of phi

  // Throws InvalidArgument on zero dimensions or a w/s combination whose
  // column-min sum could overflow 64 bits.
  void Validate() const;
  uint64_t counter_count() const { return p * m * s; }

  friend bool operator==(const MpuParams&, const MpuParams&) = default;
};

// Smallest of 8/16/32/64 bits that holds w + 1.
int CounterWidthBits(uint64_t w);

// Bytes of counter storage for one sketch.
uint64_t CounterBytes(const MpuParams& params);

enum class AgreementRule {
  kLiteral,  // every column with mn == mx counts, including untouched ones
  kStrict,   // only columns with mn == mx and mn <= w count
};

struct EstimateBreakdown {
  uint64_t a = 0;
  uint64_t b = 0;
  uint64_t c = 0;
  uint64_t w = 0;
  Rational estimate;  // w * a * b / c, or 0 when b == 0

  double value() const { return estimate.ToDouble(); }
};

struct SketchOptions {
  uint64_t epoch_len = kUnboundedEpoch;
  uint64_t memory_cap_bytes = kDefaultSketchMemoryCap;
};

class MpuSketch {
 public:
  // Hash derivation indices: h_k -> k (0-based), g -> p, phi -> p + 1.
  MpuSketch(const MpuParams& params, HashSeed seed,
            const SketchOptions& options = {});

  const MpuParams& params() const { return params_; }
  HashSeed seed() const { return seed_; }
  int counter_width_bits() const { return width_bits_; }
  uint64_t memory_bytes() const { return CounterBytes(params_); }
  uint64_t sentinel() const { return params_.w + 1; }

  // Slots must lie in [0, epoch_len). Not part of the serialized state.
  uint64_t epoch_len() const { return epoch_len_; }
  void set_epoch_len(uint64_t epoch_len) { epoch_len_ = epoch_len; }

  const PairwiseHash& row_hash(size_t block) const { return row_hashes_[block]; }
  const PairwiseHash& col_hash() const { return col_hash_; }
  const PairwiseHash& value_hash() const { return value_hash_; }

  // 0-based accessor.
  uint64_t counter(size_t block, size_t row, size_t col) const;

  // Throws RangeError when slot is outside the epoch.
  void CheckSlot(uint64_t slot) const;

  // C_k[h_k(key)][g(x)] = min(., phi(x)) for every block k, x = Mix64(slot).
  void Update(uint64_t key, uint64_t slot);

  // Same as Update, with g and phi applied to an arbitrary 64-bit item type
  // instead of a time slot. No epoch check.
  void UpdateTyped(uint64_t key, uint64_t type_key);

  EstimateBreakdown Estimate(uint64_t key_i, uint64_t key_j,
                             AgreementRule rule = AgreementRule::kLiteral) const;

  // Counter-wise min. Throws IncompatibleSketch unless params and seed match.
  void Merge(const MpuSketch& src);

  // Binary format, little-endian:
  //   "MPUS" | u16 version=1 | u8 width | u8 0 | u64 p,m,s,w | u64 seed |
  //   (p+2) x (u64 a, u64 b) for h_1..h_p, g, phi |
  //   p*m*s counters at `width` bits, index order (k, r, l) |
  //   u64 DigestKey(all preceding bytes)
  void Save(std::ostream& out) const;
  std::vector<uint8_t> Serialize() const;
  // Throws FormatError on bad magic, version, width, counters, hash
  // coefficients, checksum or truncation.
  static MpuSketch Load(std::istream& in, const SketchOptions& options = {});

  // Same params, seed and counters. Epoch length is not compared.
  friend bool operator==(const MpuSketch& x, const MpuSketch& y);

 private:
  using Storage = std::variant<std::vector<uint8_t>, std::vector<uint16_t>,
                               std::vector<uint32_t>, std::vector<uint64_t>>;

  size_t Index(size_t block, size_t row, size_t col) const {
    return (block * params_.m + row) * params_.s + col;
  }
  void ApplyItem(uint64_t key, uint64_t item);

  MpuParams params_;
  HashSeed seed_;
  int width_bits_;
  uint64_t epoch_len_;
  std::vector<PairwiseHash> row_hashes_;
  PairwiseHash col_hash_;
  PairwiseHash value_hash_;
  Storage counters_;
};

}  // namespace mpu

#endif  // MPU_SKETCH_H_
