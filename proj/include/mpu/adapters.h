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

// Reductions of group, tuple-typed and lagged correlation onto plain
// sketch updates.
//
//  * Groups: feed the group's key instead of the flow's. Several members
//    active in one slot collapse into a single update, so the sketch tracks
//    the "any member active" indicator.
//  * Related services: the item type is the (source, slot) tuple, so two
//    services correlate when the same source hits both in the same slot.
//  * Lag: activity of flow j at slot t is replayed into a virtual key G at
//    slots t, t-1, ..., t-tau (skipping negatives). Estimating (i, G) then
//    counts slots of i followed by j within tau slots.
//
// Derived keys are digests of namespaced byte strings:
//   virtual key: DigestKey(0x01 | u64le flow_key | u64le tau)
//   tuple key:   DigestKey(0x02 | u64le src_key  | u64le slot)
// Trace flow IDs are printable text and never start with those bytes.

#ifndef MPU_ADAPTERS_H_
#define MPU_ADAPTERS_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mpu/estimator.h"

namespace mpu {

inline constexpr uint8_t kLagNamespace = 0x01;
inline constexpr uint8_t kTupleNamespace = 0x02;

// Throws InvalidArgument for tau < 0.
uint64_t VirtualKeyFor(uint64_t flow_key, int64_t tau);
uint64_t TupleKey(uint64_t src_key, uint64_t slot);

// Many-to-one flow -> group assignment.
class GroupMap {
 public:
  void Assign(uint64_t flow_key, uint64_t group_key);
  std::optional<uint64_t> Find(uint64_t flow_key) const;

  // Unmapped flows are their own group unless strict, where they throw
  // InvalidArgument.
  uint64_t Resolve(uint64_t flow_key) const;

  bool strict() const { return strict_; }
  void set_strict(bool strict) { strict_ = strict; }
  size_t size() const { return assignment_.size(); }

  // Flow keys assigned to `group_key`, in insertion order.
  std::vector<uint64_t> Members(uint64_t group_key) const;

  // NDJSON, one {"flow": "...", "group": "..."} object per line; blank lines
  // are skipped. Throws FormatError with the line number on bad input.
  static GroupMap LoadNdjson(std::istream& in);

 private:
  std::unordered_map<uint64_t, uint64_t> assignment_;
  std::vector<std::pair<uint64_t, uint64_t>> order_;
  bool strict_ = false;
};

struct LagConfig {
  int64_t tau = 0;
  uint64_t virtual_key = 0;

  // Config targeting flow `flow_key`; virtual_key = VirtualKeyFor(flow, tau).
  static LagConfig For(uint64_t flow_key, int64_t tau);
};

void UpdateGroup(MpuEnsemble& e, const GroupMap& groups, uint64_t flow_key,
                 uint64_t slot);

// Updates the virtual key at slots t - w for 0 <= w <= tau with t - w >= 0.
void UpdateLagged(MpuEnsemble& e, const LagConfig& lag, uint64_t slot);

void UpdateRelated(MpuEnsemble& e, uint64_t service_key, uint64_t src_key,
                   uint64_t slot);

}  // namespace mpu

#endif  // MPU_ADAPTERS_H_
