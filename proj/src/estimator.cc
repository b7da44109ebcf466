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

#include "mpu/estimator.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "mpu/byte_io.h"
#include "mpu/errors.h"

namespace mpu {
namespace {

// Guards ceil() against representation error, e.g. 1 / 0.1^2 evaluating to
// 100.00000000000001.
constexpr double kCeilSlack = 1e-9;

uint64_t CeilWithSlack(double x) {
  return static_cast<uint64_t>(std::ceil(x * (1.0 - kCeilSlack)));
}

// Saturating m^p.
u128 SaturatingPow(uint64_t m, uint64_t p) {
  constexpr u128 kMax = ~u128{0};
  u128 r = 1;
  for (uint64_t i = 0; i < p; ++i) {
    if (m != 0 && r > kMax / m) return kMax;
    r *= m;
  }
  return r;
}

}  // namespace

uint64_t IntegerRootCeil(u128 target, uint64_t p) {
  if (p == 0) throw InvalidArgument("root degree must be >= 1");
  if (target <= 1) return 1;
  // Start from the floating estimate and correct by stepping.
  uint64_t m = static_cast<uint64_t>(
      std::max(1.0L, std::floor(std::pow(static_cast<long double>(target),
                                         1.0L / static_cast<long double>(p)))));
  while (m > 1 && SaturatingPow(m - 1, p) >= target) --m;
  while (SaturatingPow(m, p) < target) ++m;
  return m;
}

uint64_t Plan::memory_bytes() const {
  return copies * CounterBytes(params());
}

void Plan::Validate() const {
  params().Validate();
  if (copies == 0 || copies % 2 == 0) {
    throw InvalidArgument("plan: copies must be odd, got " +
                          std::to_string(copies));
  }
  if (epoch_len == 0) throw InvalidArgument("plan: epoch length must be >= 1");
}

Plan MakePlan(const PlanInput& in, uint64_t memory_cap_bytes) {
  if (!(in.epsilon > 0.0 && in.epsilon < 1.0)) {
    throw InvalidArgument("plan: epsilon must lie in (0, 1)");
  }
  if (!(in.delta > 0.0 && in.delta < 1.0)) {
    throw InvalidArgument("plan: delta must lie in (0, 1)");
  }
  if (in.epoch_len == 0 || in.flow_count == 0 || in.p == 0) {
    throw InvalidArgument("plan: |T|, |F| and p must be >= 1");
  }
  Plan plan;
  plan.p = in.p;
  plan.epoch_len = in.epoch_len;
  plan.s = std::max<uint64_t>(1, CeilWithSlack(1.0 / (in.epsilon * in.epsilon)));
  const u128 two_f = u128{2} * in.flow_count;
  plan.m = IntegerRootCeil(two_f * two_f, in.p);
  const u128 t2 = static_cast<u128>(in.epoch_len) * in.epoch_len;
  const u128 w = (5 * t2 + plan.s - 1) / plan.s;
  if (w >= kMersenne61) {
    throw InvalidArgument("plan: w = ceil(5|T|^2/s) exceeds 2^61 - 2");
  }
  plan.w = static_cast<uint64_t>(w);
  uint64_t copies = CeilWithSlack(8.0 * std::log(1.0 / in.delta));
  if (copies == 0) copies = 1;
  if (copies % 2 == 0) ++copies;
  plan.copies = copies;
  plan.Validate();
  const uint64_t bytes = plan.memory_bytes();
  if (bytes / plan.copies != CounterBytes(plan.params()) ||
      bytes > memory_cap_bytes) {
    throw MemoryCapExceeded("plan needs " + std::to_string(bytes) +
                                " bytes of counters, cap is " +
                                std::to_string(memory_cap_bytes),
                            bytes);
  }
  return plan;
}

MpuEnsemble::MpuEnsemble(const Plan& plan, HashSeed master_seed,
                         uint64_t memory_cap_bytes)
    : plan_(plan) {
  plan_.Validate();
  if (plan_.memory_bytes() > memory_cap_bytes) {
    throw MemoryCapExceeded("ensemble exceeds memory cap",
                            plan_.memory_bytes());
  }
  SketchOptions options;
  options.epoch_len = plan_.epoch_len;
  options.memory_cap_bytes = memory_cap_bytes;
  sketches_.reserve(plan_.copies);
  for (uint64_t c = 0; c < plan_.copies; ++c) {
    sketches_.emplace_back(plan_.params(),
                           HashSeed{DeriveSeed(master_seed.value, c)}, options);
  }
}

MpuEnsemble::MpuEnsemble(const Plan& plan, std::vector<MpuSketch> sketches)
    : plan_(plan), sketches_(std::move(sketches)) {}

void MpuEnsemble::Update(uint64_t key, uint64_t slot) {
  sketches_.front().CheckSlot(slot);
  for (MpuSketch& sk : sketches_) sk.UpdateTyped(key, slot);
}

void MpuEnsemble::UpdateTyped(uint64_t key, uint64_t type_key) {
  for (MpuSketch& sk : sketches_) sk.UpdateTyped(key, type_key);
}

std::vector<EstimateBreakdown> MpuEnsemble::EstimateAll(
    uint64_t key_i, uint64_t key_j, AgreementRule rule) const {
  std::vector<EstimateBreakdown> out;
  out.reserve(sketches_.size());
  for (const MpuSketch& sk : sketches_) {
    out.push_back(sk.Estimate(key_i, key_j, rule));
  }
  return out;
}

Rational MedianOf(std::vector<Rational> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

Rational MpuEnsemble::EstimateMedian(uint64_t key_i, uint64_t key_j,
                                     AgreementRule rule) const {
  std::vector<Rational> values;
  values.reserve(sketches_.size());
  for (const MpuSketch& sk : sketches_) {
    values.push_back(sk.Estimate(key_i, key_j, rule).estimate);
  }
  return MedianOf(std::move(values));
}

void MpuEnsemble::Merge(const MpuEnsemble& other) {
  if (!(plan_.params() == other.plan_.params()) ||
      sketches_.size() != other.sketches_.size()) {
    throw IncompatibleSketch("ensembles differ in plan or copy count");
  }
  for (size_t c = 0; c < sketches_.size(); ++c) {
    if (!(sketches_[c].seed() == other.sketches_[c].seed())) {
      throw IncompatibleSketch("ensembles differ in copy seeds");
    }
  }
  for (size_t c = 0; c < sketches_.size(); ++c) {
    sketches_[c].Merge(other.sketches_[c]);
  }
}

void MpuEnsemble::Save(std::ostream& out) const {
  ByteWriter head;
  head.Put<uint32_t>(static_cast<uint32_t>(sketches_.size()));
  out.write(reinterpret_cast<const char*>(head.bytes().data()),
            static_cast<std::streamsize>(head.bytes().size()));
  for (const MpuSketch& sk : sketches_) sk.Save(out);
  ByteWriter tail;
  tail.Put<uint64_t>(plan_.s);
  tail.Put<uint64_t>(plan_.w);
  tail.Put<uint64_t>(plan_.m);
  tail.Put<uint64_t>(plan_.copies);
  tail.Put<uint64_t>(plan_.p);
  tail.Put<uint64_t>(plan_.epoch_len);
  out.write(reinterpret_cast<const char*>(tail.bytes().data()),
            static_cast<std::streamsize>(tail.bytes().size()));
  if (!out) throw Error("failed to write ensemble");
}

MpuEnsemble MpuEnsemble::Load(std::istream& in, uint64_t memory_cap_bytes) {
  std::vector<uint8_t> head;
  ReadExactly(in, 4, head);
  const uint32_t copies = ByteReader(head).Get<uint32_t>();
  if (copies == 0) throw FormatError("ensemble: zero copies");
  std::vector<MpuSketch> sketches;
  // No reserve: the count is untrusted until the blocks actually parse.
  SketchOptions options;
  options.memory_cap_bytes = memory_cap_bytes;
  uint64_t total = 0;
  for (uint32_t c = 0; c < copies; ++c) {
    sketches.push_back(MpuSketch::Load(in, options));
    total += sketches.back().memory_bytes();
    if (total > memory_cap_bytes) {
      throw FormatError("ensemble: declared size exceeds the memory cap");
    }
  }
  std::vector<uint8_t> tail;
  ReadExactly(in, 6 * 8, tail);
  ByteReader r(tail);
  Plan plan;
  plan.s = r.Get<uint64_t>();
  plan.w = r.Get<uint64_t>();
  plan.m = r.Get<uint64_t>();
  plan.copies = r.Get<uint64_t>();
  plan.p = r.Get<uint64_t>();
  plan.epoch_len = r.Get<uint64_t>();
  try {
    plan.Validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("ensemble: ") + e.what());
  }
  if (plan.copies != copies) {
    throw FormatError("ensemble: copy count disagrees with plan");
  }
  for (MpuSketch& sk : sketches) {
    if (!(sk.params() == plan.params())) {
      throw FormatError("ensemble: sketch params disagree with plan");
    }
    sk.set_epoch_len(plan.epoch_len);
  }
  return MpuEnsemble(plan, std::move(sketches));
}

}  // namespace mpu
