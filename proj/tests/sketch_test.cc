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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "mpu/errors.h"
#include "mpu/hashing.h"
#include "mpu/rng.h"
#include "mpu/sketch.h"

namespace mpu {
namespace {

using Event = std::pair<uint64_t, uint64_t>;  // (key, slot)

std::vector<uint64_t> AllCounters(const MpuSketch& sk) {
  const MpuParams& q = sk.params();
  std::vector<uint64_t> out;
  for (size_t k = 0; k < q.p; ++k)
    for (size_t r = 0; r < q.m; ++r)
      for (size_t l = 0; l < q.s; ++l) out.push_back(sk.counter(k, r, l));
  return out;
}

std::vector<Event> RandomEvents(SplitMix64& rng, size_t n, uint64_t flows,
                                uint64_t epoch) {
  std::vector<Event> ev;
  for (size_t i = 0; i < n; ++i) {
    ev.emplace_back(DigestKey("f" + std::to_string(rng.Below(flows))),
                    rng.Below(epoch));
  }
  return ev;
}

MpuSketch Build(const MpuParams& q, uint64_t seed, const std::vector<Event>& ev) {
  MpuSketch sk(q, HashSeed{seed});
  for (const auto& [k, t] : ev) sk.Update(k, t);
  return sk;
}

void PatchChecksum(std::vector<uint8_t>& bytes) {
  const uint64_t sum = DigestKey(
      std::span<const uint8_t>(bytes.data(), bytes.size() - 8));
  for (int i = 0; i < 8; ++i) bytes[bytes.size() - 8 + i] = static_cast<uint8_t>(sum >> (8 * i));
}

MpuSketch LoadBytes(const std::vector<uint8_t>& bytes) {
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return MpuSketch::Load(in);
}

TEST(Sketch, FreshCountersHoldSentinel) {
  const MpuSketch one({1, 1, 1, 1}, HashSeed{0});
  EXPECT_EQ(one.counter(0, 0, 0), 2u);
  const MpuSketch sk({3, 64, 128, 1024}, HashSeed{7});
  const auto all = AllCounters(sk);
  EXPECT_EQ(all.size(), 3u * 64 * 128);
  EXPECT_TRUE(std::all_of(all.begin(), all.end(),
                          [](uint64_t v) { return v == 1025; }));
}

TEST(Sketch, SameSeedSameStructure) {
  const MpuSketch x({3, 16, 32, 500}, HashSeed{9});
  const MpuSketch y({3, 16, 32, 500}, HashSeed{9});
  EXPECT_EQ(x, y);
  EXPECT_EQ(x.Serialize(), y.Serialize());
  EXPECT_NE(x.col_hash(), MpuSketch({3, 16, 32, 500}, HashSeed{10}).col_hash());
}

TEST(Sketch, CounterWidthIsSmallestThatHoldsSentinel) {
  EXPECT_EQ(CounterWidthBits(1), 8);
  EXPECT_EQ(CounterWidthBits(254), 8);
  EXPECT_EQ(CounterWidthBits(255), 16);
  EXPECT_EQ(CounterWidthBits(65534), 16);
  EXPECT_EQ(CounterWidthBits(65535), 32);
  EXPECT_EQ(CounterWidthBits(0xfffffffeULL), 32);
  EXPECT_EQ(CounterWidthBits(0xffffffffULL), 64);
  EXPECT_EQ(CounterBytes({2, 3, 5, 1000}), 2u * 3 * 5 * 2);
}

TEST(Sketch, RejectsBadParams) {
  EXPECT_THROW(MpuSketch({0, 1, 1, 1}, HashSeed{0}), InvalidArgument);
  EXPECT_THROW(MpuSketch({1, 0, 1, 1}, HashSeed{0}), InvalidArgument);
  EXPECT_THROW(MpuSketch({1, 1, 0, 1}, HashSeed{0}), InvalidArgument);
  EXPECT_THROW(MpuSketch({1, 1, 1, 0}, HashSeed{0}), InvalidArgument);
  EXPECT_THROW(MpuSketch({65, 1, 1, 1}, HashSeed{0}), InvalidArgument);
  EXPECT_THROW(MpuSketch({4, 1ULL << 40, 1ULL << 40, 1}, HashSeed{0}),
               InvalidArgument);
  SketchOptions tiny;
  tiny.memory_cap_bytes = 100;
  EXPECT_THROW(MpuSketch({1, 10, 11, 100}, HashSeed{0}, tiny), MemoryCapExceeded);
  EXPECT_NO_THROW(MpuSketch({1, 10, 10, 100}, HashSeed{0}, tiny));
}

TEST(Sketch, OneUpdateTouchesOneCounterPerBlock) {
  MpuSketch sk({4, 8, 16, 100}, HashSeed{3});
  const uint64_t key = DigestKey("f");
  sk.Update(key, 17);
  const uint64_t x = Mix64(17);
  const uint64_t col = sk.col_hash().Bucket(x);
  const uint64_t val = sk.value_hash().Eval(x);
  size_t changed = 0;
  for (size_t k = 0; k < 4; ++k) {
    for (size_t r = 0; r < 8; ++r) {
      for (size_t l = 0; l < 16; ++l) {
        const bool hit = r == sk.row_hash(k).Bucket(key) && l == col;
        EXPECT_EQ(sk.counter(k, r, l), hit ? val : 101u);
        changed += hit;
      }
    }
  }
  EXPECT_EQ(changed, 4u);
}

TEST(Sketch, UpdatesOnlyLowerCounters) {
  SplitMix64 rng(1);
  MpuSketch sk({3, 8, 32, 50}, HashSeed{5});
  auto before = AllCounters(sk);
  for (const auto& [k, t] : RandomEvents(rng, 2000, 20, 300)) {
    sk.Update(k, t);
    const auto after = AllCounters(sk);
    size_t changed = 0;
    for (size_t i = 0; i < after.size(); ++i) {
      ASSERT_LE(after[i], before[i]);
      ASSERT_GE(after[i], 1u);
      changed += after[i] != before[i];
    }
    ASSERT_LE(changed, 3u);
    before = after;
  }
}

TEST(Sketch, SetSemanticsUnderDuplicatesAndPermutation) {
  SplitMix64 rng(2);
  const MpuParams q{3, 16, 64, 5000};
  const auto ev = RandomEvents(rng, 1000, 30, 400);
  const MpuSketch base = Build(q, 11, ev);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = ev;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const size_t extra = shuffled.size() / 3;
    for (size_t i = 0; i < extra; ++i) shuffled.push_back(shuffled[i]);
    EXPECT_EQ(Build(q, 11, shuffled), base);
  }
  MpuSketch twice = base;
  twice.Update(ev[0].first, ev[0].second);
  EXPECT_EQ(twice, base);
}

TEST(Sketch, EpochIsEnforced) {
  SketchOptions opt;
  opt.epoch_len = 10;
  MpuSketch sk({1, 4, 4, 9}, HashSeed{1}, opt);
  EXPECT_NO_THROW(sk.Update(1, 9));
  EXPECT_THROW(sk.Update(1, 10), RangeError);
  EXPECT_NO_THROW(sk.UpdateTyped(1, 1000));  // typed items carry no slot
}

TEST(Sketch, FreshEstimateIsZero) {
  const MpuSketch sk({2, 8, 20, 99}, HashSeed{4});
  const EstimateBreakdown e = sk.Estimate(1, 2);
  EXPECT_EQ(e.a, 20u);
  EXPECT_EQ(e.b, 0u);
  EXPECT_EQ(e.c, 20u * 100);
  EXPECT_EQ(e.estimate, Rational::Zero());
  EXPECT_EQ(sk.Estimate(1, 2, AgreementRule::kStrict).a, 0u);
}

TEST(Sketch, EstimateIsSymmetricAndBounded) {
  SplitMix64 rng(3);
  const MpuParams q{3, 8, 64, 20000};
  const MpuSketch sk = Build(q, 21, RandomEvents(rng, 3000, 40, 1000));
  for (int i = 0; i < 200; ++i) {
    const uint64_t x = DigestKey("f" + std::to_string(rng.Below(50)));
    const uint64_t y = DigestKey("f" + std::to_string(rng.Below(50)));
    for (AgreementRule rule : {AgreementRule::kLiteral, AgreementRule::kStrict}) {
      const EstimateBreakdown e = sk.Estimate(x, y, rule);
      const EstimateBreakdown f = sk.Estimate(y, x, rule);
      ASSERT_EQ(e.a, f.a);
      ASSERT_EQ(e.b, f.b);
      ASSERT_EQ(e.c, f.c);
      ASSERT_EQ(e.estimate.num, f.estimate.num);
      ASSERT_EQ(e.estimate.den, f.estimate.den);
      ASSERT_LE(e.a, q.s);
      ASSERT_LE(e.b, q.s);
      ASSERT_GE(e.c, q.s);
      ASSERT_LE(e.c, q.s * (q.w + 1));
      if (rule == AgreementRule::kLiteral) {
        ASSERT_GE(e.a, q.s - e.b);
      }
    }
  }
}

TEST(Sketch, EstimateFollowsBreakdown) {
  SplitMix64 rng(6);
  const MpuSketch sk = Build({2, 4, 16, 1000}, 8, RandomEvents(rng, 200, 6, 100));
  const EstimateBreakdown e = sk.Estimate(DigestKey("f1"), DigestKey("f2"));
  ASSERT_GT(e.b, 0u);
  EXPECT_EQ(e.estimate, (Rational{static_cast<u128>(1000) * e.a * e.b, e.c}));
}

TEST(Sketch, MergeIsHomomorphic) {
  SplitMix64 rng(4);
  const MpuParams q{3, 16, 32, 3000};
  const MpuSketch fresh(q, HashSeed{5});
  MpuSketch ff = fresh;
  ff.Merge(fresh);
  EXPECT_EQ(ff, fresh);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ev = RandomEvents(rng, 300, 25, 500);
    const size_t cut = rng.Below(ev.size() + 1);
    const std::vector<Event> a(ev.begin(), ev.begin() + cut);
    const std::vector<Event> b(ev.begin() + cut, ev.end());
    MpuSketch left = Build(q, 5, a);
    const MpuSketch whole = Build(q, 5, ev);
    MpuSketch with_fresh = left;
    with_fresh.Merge(fresh);
    ASSERT_EQ(with_fresh, left);
    left.Merge(Build(q, 5, b));
    ASSERT_EQ(left, whole);
  }
}

TEST(Sketch, MergeRejectsMismatch) {
  MpuSketch x({2, 4, 8, 100}, HashSeed{1});
  EXPECT_THROW(x.Merge(MpuSketch({2, 4, 8, 100}, HashSeed{2})), IncompatibleSketch);
  EXPECT_THROW(x.Merge(MpuSketch({2, 4, 8, 101}, HashSeed{1})), IncompatibleSketch);
}

TEST(Sketch, SaveLoadRoundTrip) {
  SplitMix64 rng(5);
  for (uint64_t w : {100ULL, 1000ULL, 100000ULL, 1ULL << 40}) {
    const MpuParams q{3, 32, 64, w};
    const MpuSketch fresh(q, HashSeed{w});
    EXPECT_EQ(LoadBytes(fresh.Serialize()), fresh);
    MpuSketch sk(q, HashSeed{w});
    for (int i = 0; i < 100000; ++i) {
      sk.Update(DigestKey("f" + std::to_string(rng.Below(500))), rng.Below(1000));
    }
    std::stringstream buf;
    sk.Save(buf);
    const MpuSketch back = MpuSketch::Load(buf);
    ASSERT_EQ(back, sk);
    EXPECT_EQ(back.Serialize(), sk.Serialize());
    for (int i = 0; i < 100; ++i) {
      const uint64_t x = DigestKey("f" + std::to_string(rng.Below(500)));
      const uint64_t y = DigestKey("f" + std::to_string(rng.Below(500)));
      ASSERT_EQ(back.Estimate(x, y).estimate, sk.Estimate(x, y).estimate);
    }
  }
}

TEST(Sketch, LoadRejectsCorruption) {
  MpuSketch sk({2, 4, 8, 100}, HashSeed{3});
  sk.Update(1, 2);
  const std::vector<uint8_t> good = sk.Serialize();
  ASSERT_NO_THROW(LoadBytes(good));

  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(LoadBytes(bad), FormatError);  // magic

  bad = good;
  bad[4] = 2;
  EXPECT_THROW(LoadBytes(bad), FormatError);  // version

  bad = good;
  bad[7] = 1;
  EXPECT_THROW(LoadBytes(bad), FormatError);  // reserved

  for (size_t cut : {0ul, 3ul, 20ul, good.size() - 1}) {
    const std::vector<uint8_t> trunc(good.begin(), good.begin() + cut);
    EXPECT_THROW(LoadBytes(trunc), FormatError);
  }

  bad = good;
  bad[good.size() - 20] ^= 1;
  EXPECT_THROW(LoadBytes(bad), FormatError);  // checksum

  // Counter outside {1..w+1}, with a valid checksum.
  const size_t counters = 4 + 2 + 1 + 1 + 5 * 8 + 4 * 16;
  bad = good;
  bad[counters] = 0;
  PatchChecksum(bad);
  EXPECT_THROW(LoadBytes(bad), FormatError);
  bad[counters] = 102;
  PatchChecksum(bad);
  EXPECT_THROW(LoadBytes(bad), FormatError);

  // Hash coefficients that the seed does not produce.
  bad = good;
  bad[4 + 2 + 1 + 1 + 5 * 8] ^= 1;
  PatchChecksum(bad);
  EXPECT_THROW(LoadBytes(bad), FormatError);

  // Declared width inconsistent with w.
  bad = good;
  bad[6] = 16;
  PatchChecksum(bad);
  EXPECT_THROW(LoadBytes(bad), FormatError);
}

TEST(Sketch, TypedUpdates) {
  MpuSketch sk({2, 8, 16, 1000}, HashSeed{2});
  sk.UpdateTyped(5, 0xabcdef);
  const uint64_t val = sk.value_hash().Eval(Mix64(0xabcdef));
  const uint64_t col = sk.col_hash().Bucket(Mix64(0xabcdef));
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(sk.counter(k, sk.row_hash(k).Bucket(5), col), val);
  }
  const MpuSketch once = sk;
  sk.UpdateTyped(5, 0xabcdef);
  EXPECT_EQ(sk, once);
}

TEST(Sketch, IdenticalTypeSetsEstimateTheirSize) {
  // Two flows fed the same 200 type keys; mean over 100 seeds.
  std::vector<double> est;
  SplitMix64 rng(12);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    MpuSketch sk({2, 64, 100, 12500}, HashSeed{seed});
    for (int i = 0; i < 200; ++i) {
      const uint64_t tk = rng.Next();
      sk.UpdateTyped(DigestKey("svc_x"), tk);
      sk.UpdateTyped(DigestKey("svc_y"), tk);
    }
    est.push_back(sk.Estimate(DigestKey("svc_x"), DigestKey("svc_y")).value());
  }
  double mean = 0, var = 0;
  for (double e : est) mean += e / est.size();
  for (double e : est) var += (e - mean) * (e - mean) / (est.size() - 1);
  EXPECT_NEAR(mean, 200.0, 4 * std::sqrt(var / est.size()));
}

TEST(Sketch, SelfEstimateOfSmallFlow) {
  // |F_i| = n <= 0.2 s; estimate(i, i) over 200 seeds.
  const uint64_t s = 500, n = 100;
  std::vector<double> est;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    MpuSketch sk({2, 16, s, 50000}, HashSeed{seed + 1000});
    SplitMix64 rng(seed);
    for (uint64_t t = 0; t < n; ++t) sk.Update(DigestKey("i"), rng.Below(1000) * 1000 + t);
    est.push_back(sk.Estimate(DigestKey("i"), DigestKey("i")).value());
  }
  double mean = 0, var = 0;
  for (double e : est) mean += e / est.size();
  for (double e : est) var += (e - mean) * (e - mean) / (est.size() - 1);
  EXPECT_NEAR(mean, static_cast<double>(n), 4 * std::sqrt(var / est.size()) + 1e-9);
}

}  // namespace
}  // namespace mpu
