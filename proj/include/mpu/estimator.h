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

// (epsilon, delta) planning and the median-of-copies ensemble.
//
// Planner constants (the asymptotic sizing leaves them free):
//
//   s      = ceil(1 / eps^2)
//   m      = ceil((2 |F|)^(2/p))        i.e. the least m with m^p >= 4 |F|^2
//   w      = ceil(5 |T|^2 / s)          so that w * s >= 5 |T|^2
//   copies = least odd integer >= 8 ln(1/delta)
//
// With these, the chance two flows share all p rows is at most 1/8 and the
// chance phi's discreteness matters is at most 1/10 per copy; the median
// over 8 ln(1/delta) copies pushes the failure rate below delta.

#ifndef MPU_ESTIMATOR_H_
#define MPU_ESTIMATOR_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mpu/hashing.h"
#include "mpu/rational.h"
#include "mpu/sketch.h"

namespace mpu {

inline constexpr uint64_t kDefaultPlanMemoryCap = uint64_t{8} << 30;  // 8 GiB

struct PlanInput {
  double epsilon = 0.1;
  double delta = 0.1;
  uint64_t epoch_len = 1;
  uint64_t flow_count = 1;
  uint64_t p = 3;
};

struct Plan {
  uint64_t s = 1;
  uint64_t w = 1;
  uint64_t m = 1;
  uint64_t copies = 1;
  uint64_t p = 1;
  uint64_t epoch_len = kUnboundedEpoch;

  MpuParams params() const { return {p, m, s, w}; }
  // copies * p * m * s * counter_width / 8.
  uint64_t memory_bytes() const;
  // Throws InvalidArgument on even or zero copies or invalid sketch params.
  void Validate() const;

  friend bool operator==(const Plan&, const Plan&) = default;
};

// Throws InvalidArgument for eps or delta outside (0, 1), zero |T|, |F| or
// p; throws MemoryCapExceeded when the planned counters exceed the cap.
Plan MakePlan(const PlanInput& input,
              uint64_t memory_cap_bytes = kDefaultPlanMemoryCap);

// Least m with m^p >= target (exact integer arithmetic).
uint64_t IntegerRootCeil(u128 target, uint64_t p);

class MpuEnsemble {
 public:
  // Copy c is seeded with DeriveSeed(master_seed, c).
  MpuEnsemble(const Plan& plan, HashSeed master_seed,
              uint64_t memory_cap_bytes = kDefaultPlanMemoryCap);

  const Plan& plan() const { return plan_; }
  size_t copies() const { return sketches_.size(); }
  const MpuSketch& copy(size_t i) const { return sketches_[i]; }
  MpuSketch& copy(size_t i) { return sketches_[i]; }
  uint64_t memory_bytes() const { return plan_.memory_bytes(); }

  // Validates the slot once, then updates every copy.
  void Update(uint64_t key, uint64_t slot);
  void UpdateTyped(uint64_t key, uint64_t type_key);

  std::vector<EstimateBreakdown> EstimateAll(
      uint64_t key_i, uint64_t key_j,
      AgreementRule rule = AgreementRule::kLiteral) const;
  // Middle order statistic of the per-copy estimates.
  Rational EstimateMedian(uint64_t key_i, uint64_t key_j,
                          AgreementRule rule = AgreementRule::kLiteral) const;

  // Copy-wise merge; throws IncompatibleSketch on any mismatch.
  void Merge(const MpuEnsemble& other);

  // u32 copies | per-copy sketch blocks | u64 s, w, m, copies, p, epoch_len
  void Save(std::ostream& out) const;
  static MpuEnsemble Load(std::istream& in,
                          uint64_t memory_cap_bytes = kDefaultPlanMemoryCap);

  friend bool operator==(const MpuEnsemble& x, const MpuEnsemble& y) {
    return x.plan_ == y.plan_ && x.sketches_ == y.sketches_;
  }

 private:
  MpuEnsemble(const Plan& plan, std::vector<MpuSketch> sketches);

  Plan plan_;
  std::vector<MpuSketch> sketches_;
};

Rational MedianOf(std::vector<Rational> values);

}  // namespace mpu

#endif  // MPU_ESTIMATOR_H_
