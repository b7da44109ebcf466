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

// Exact ground truth. Stores every flow's set of active slots, so memory is
// linear in total activity. Keys are the same 64-bit digests the sketches
// use; unknown keys behave as empty sets.

#ifndef MPU_ORACLE_H_
#define MPU_ORACLE_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <unordered_map>

#include "mpu/sketch.h"

namespace mpu {

class ExactTracker {
 public:
  explicit ExactTracker(uint64_t epoch_len = kUnboundedEpoch)
      : epoch_len_(epoch_len) {}

  uint64_t epoch_len() const { return epoch_len_; }

  // Throws RangeError for slot >= epoch_len. Idempotent.
  void Record(uint64_t key, uint64_t slot);
  // Records an arbitrary item type (e.g. a (src, slot) tuple); no epoch check.
  void RecordType(uint64_t key, uint64_t type_key);

  // F_key; empty for unknown keys.
  const std::set<uint64_t>& Activity(uint64_t key) const;
  size_t key_count() const { return activity_.size(); }

  // |F_i intersect F_j|.
  uint64_t Cor(uint64_t key_i, uint64_t key_j) const;

  // |(union of F_a, a in A) intersect (union of F_b, b in B)|.
  uint64_t GCorAny(std::span<const uint64_t> group_a,
                   std::span<const uint64_t> group_b) const;

  // sum_{0<=w<=tau} sum_t f_i(t) f_j(t + w); slots past the epoch end are
  // inactive. Throws InvalidArgument for tau < 0.
  uint64_t CorTau(uint64_t key_i, uint64_t key_j, int64_t tau) const;

  // |F_i intersect G| with G = union over 0<=w<=tau of (F_j - w), clipped at
  // slot 0: the indicator version of CorTau. Equals CorTau whenever no slot
  // of F_i sees two activities of j within its lag window.
  uint64_t LaggedUnionCor(uint64_t key_i, uint64_t key_j, int64_t tau) const;

 private:
  uint64_t epoch_len_;
  std::unordered_map<uint64_t, std::set<uint64_t>> activity_;
};

struct FreqStats {
  std::map<uint64_t, uint64_t> freq;  // types with nonzero frequency
  uint64_t distinct = 0;              // |X|

  uint64_t Freq(uint64_t type) const {
    const auto it = freq.find(type);
    return it == freq.end() ? 0 : it->second;
  }
};

FreqStats ComputeFreqStats(std::span<const uint64_t> items);

// X join Y = sum over types of Freq_X(type) * Freq_Y(type).
uint64_t JoinSize(std::span<const uint64_t> x, std::span<const uint64_t> y);

}  // namespace mpu

#endif  // MPU_ORACLE_H_
