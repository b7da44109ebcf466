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

#include <sstream>
#include <unordered_set>

#include <gtest/gtest.h>

#include "mpu/adapters.h"
#include "mpu/errors.h"
#include "mpu/rng.h"

namespace mpu {
namespace {

Plan TestPlan() {
  Plan p;
  p.s = 16;
  p.w = 3000;
  p.m = 8;
  p.copies = 3;
  p.p = 2;
  p.epoch_len = 300;
  return p;
}

TEST(Adapters, SingletonGroupsMatchFlowTracking) {
  GroupMap groups;
  for (uint64_t f = 0; f < 10; ++f) groups.Assign(f, f);
  MpuEnsemble direct(TestPlan(), HashSeed{8}), grouped(TestPlan(), HashSeed{8});
  SplitMix64 rng(1);
  for (int n = 0; n < 2000; ++n) {
    const uint64_t f = rng.Below(10), t = rng.Below(300);
    direct.Update(f, t);
    UpdateGroup(grouped, groups, f, t);
  }
  std::stringstream a, b;
  direct.Save(a);
  grouped.Save(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Adapters, ZeroLagMatchesFlowTracking) {
  MpuEnsemble direct(TestPlan(), HashSeed{9}), lagged(TestPlan(), HashSeed{9});
  const uint64_t j = 42;
  const LagConfig lag = LagConfig::For(j, 0);
  SplitMix64 rng(2);
  for (int n = 0; n < 500; ++n) {
    const uint64_t t = rng.Below(300);
    direct.Update(lag.virtual_key, t);
    UpdateLagged(lagged, lag, t);
  }
  EXPECT_EQ(direct, lagged);
}

TEST(Adapters, LagClampsAtSlotZero) {
  MpuEnsemble expected(TestPlan(), HashSeed{1}), got(TestPlan(), HashSeed{1});
  const LagConfig lag = LagConfig::For(7, 3);
  UpdateLagged(got, lag, 1);
  expected.Update(lag.virtual_key, 1);
  expected.Update(lag.virtual_key, 0);
  EXPECT_EQ(got, expected);
  EXPECT_THROW(UpdateLagged(got, lag, 300), RangeError);
  EXPECT_THROW(UpdateLagged(got, LagConfig{-1, 0}, 3), InvalidArgument);
}

TEST(Adapters, NamespacesSeparate) {
  EXPECT_NE(VirtualKeyFor(5, 0), TupleKey(5, 0));
  EXPECT_NE(VirtualKeyFor(5, 0), 5u);
  EXPECT_NE(VirtualKeyFor(5, 1), VirtualKeyFor(5, 2));
  EXPECT_NE(TupleKey(1, 2), TupleKey(2, 1));
  EXPECT_THROW(VirtualKeyFor(5, -1), InvalidArgument);

  std::unordered_set<uint64_t> seen;
  for (uint64_t f = 0; f < 1000; ++f) {
    seen.insert(DigestKey("f" + std::to_string(f)));
    for (int64_t tau = 0; tau < 50; ++tau) {
      seen.insert(VirtualKeyFor(DigestKey("f" + std::to_string(f)), tau));
    }
    for (uint64_t t = 0; t < 50; ++t) seen.insert(TupleKey(f, t));
  }
  EXPECT_EQ(seen.size(), 1000u * 101);
}

TEST(Adapters, RelatedUsesTupleTypes) {
  MpuEnsemble a(TestPlan(), HashSeed{3}), b(TestPlan(), HashSeed{3});
  UpdateRelated(a, 11, 22, 5);
  b.UpdateTyped(11, TupleKey(22, 5));
  EXPECT_EQ(a, b);
}

TEST(GroupMapTest, ResolveAndMembers) {
  GroupMap g;
  g.Assign(1, 100);
  g.Assign(2, 100);
  g.Assign(3, 200);
  EXPECT_EQ(g.Resolve(1), 100u);
  EXPECT_EQ(g.Resolve(9), 9u);
  EXPECT_EQ(g.Members(100), (std::vector<uint64_t>{1, 2}));
  g.Assign(2, 200);
  EXPECT_EQ(g.Members(200), (std::vector<uint64_t>{2, 3}));
  EXPECT_EQ(g.size(), 3u);
  g.set_strict(true);
  EXPECT_THROW(g.Resolve(9), InvalidArgument);
  EXPECT_EQ(g.Resolve(3), 200u);
}

TEST(GroupMapTest, NdjsonLoading) {
  std::istringstream ok(
      "{\"flow\": \"a\", \"group\": \"G\"}\n\n  \n{\"flow\":\"b\",\"group\":\"G\"}\n");
  const GroupMap g = GroupMap::LoadNdjson(ok);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.Resolve(DigestKey("b")), DigestKey("G"));

  for (const char* bad : {"{\"flow\": \"a\"}\n", "not json\n",
                          "{\"flow\": 3, \"group\": \"G\"}\n",
                          "{\"flow\": \"\", \"group\": \"G\"}\n"}) {
    std::istringstream in(std::string("{\"flow\":\"x\",\"group\":\"y\"}\n") + bad);
    try {
      GroupMap::LoadNdjson(in);
      FAIL() << bad;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

}  // namespace
}  // namespace mpu
