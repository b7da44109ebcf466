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

#include "mpu/oracle.h"

#include <string>

#include "mpu/errors.h"

namespace mpu {
namespace {

const std::set<uint64_t>& EmptySet() {
  static const std::set<uint64_t> empty;
  return empty;
}

uint64_t IntersectionSize(const std::set<uint64_t>& x,
                          const std::set<uint64_t>& y) {
  const auto& small = x.size() <= y.size() ? x : y;
  const auto& large = x.size() <= y.size() ? y : x;
  uint64_t n = 0;
  for (uint64_t v : small) n += large.count(v);
  return n;
}

std::set<uint64_t> UnionOf(const ExactTracker& tr,
                           std::span<const uint64_t> keys) {
  std::set<uint64_t> out;
  for (uint64_t k : keys) {
    const auto& f = tr.Activity(k);
    out.insert(f.begin(), f.end());
  }
  return out;
}

void CheckTau(int64_t tau) {
  if (tau < 0) {
    throw InvalidArgument("lag bound tau must be >= 0, got " +
                          std::to_string(tau));
  }
}

}  // namespace

void ExactTracker::Record(uint64_t key, uint64_t slot) {
  if (slot >= epoch_len_) {
    throw RangeError("slot " + std::to_string(slot) + " outside epoch [0, " +
                     std::to_string(epoch_len_) + ")");
  }
  activity_[key].insert(slot);
}

void ExactTracker::RecordType(uint64_t key, uint64_t type_key) {
  activity_[key].insert(type_key);
}

const std::set<uint64_t>& ExactTracker::Activity(uint64_t key) const {
  const auto it = activity_.find(key);
  return it == activity_.end() ? EmptySet() : it->second;
}

uint64_t ExactTracker::Cor(uint64_t key_i, uint64_t key_j) const {
  return IntersectionSize(Activity(key_i), Activity(key_j));
}

uint64_t ExactTracker::GCorAny(std::span<const uint64_t> group_a,
                               std::span<const uint64_t> group_b) const {
  return IntersectionSize(UnionOf(*this, group_a), UnionOf(*this, group_b));
}

uint64_t ExactTracker::CorTau(uint64_t key_i, uint64_t key_j,
                              int64_t tau) const {
  CheckTau(tau);
  const auto& fj = Activity(key_j);
  uint64_t total = 0;
  for (uint64_t t : Activity(key_i)) {
    // Activity of j in [t, t + tau]; slots >= epoch_len never appear in F_j.
    const auto lo = fj.lower_bound(t);
    const auto hi = fj.upper_bound(t + static_cast<uint64_t>(tau));
    total += static_cast<uint64_t>(std::distance(lo, hi));
  }
  return total;
}

uint64_t ExactTracker::LaggedUnionCor(uint64_t key_i, uint64_t key_j,
                                      int64_t tau) const {
  CheckTau(tau);
  const auto& fj = Activity(key_j);
  uint64_t total = 0;
  for (uint64_t t : Activity(key_i)) {
    const auto lo = fj.lower_bound(t);
    if (lo != fj.end() && *lo <= t + static_cast<uint64_t>(tau)) ++total;
  }
  return total;
}

FreqStats ComputeFreqStats(std::span<const uint64_t> items) {
  FreqStats out;
  for (uint64_t v : items) ++out.freq[v];
  out.distinct = out.freq.size();
  return out;
}

uint64_t JoinSize(std::span<const uint64_t> x, std::span<const uint64_t> y) {
  const FreqStats fx = ComputeFreqStats(x);
  const FreqStats fy = ComputeFreqStats(y);
  uint64_t total = 0;
  for (const auto& [type, n] : fx.freq) total += n * fy.Freq(type);
  return total;
}

}  // namespace mpu
