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

// Acceptance suite. Prints one "criterion N: PASS|FAIL ..." line per
// criterion, followed by the rows behind it, and exits nonzero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mpu/adapters.h"
#include "mpu/bench.h"
#include "mpu/estimator.h"
#include "mpu/oracle.h"
#include "mpu/rng.h"
#include "mpu/sketch.h"

namespace {

using namespace mpu;  // NOLINT

struct Outcome {
  enum Kind { kPass, kWarn, kFail } kind = kPass;
  std::string detail;
  std::string rows;  // bench rows or failure list, printed indented
};

// Collects named property failures for one criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 20) failures_.push_back(what);
    failed_ += !ok;
  }
  Outcome Finish(const std::string& label) const {
    Outcome o;
    o.kind = failed_ == 0 ? Outcome::kPass : Outcome::kFail;
    o.detail = label + ": " + std::to_string(checks_ - failed_) + "/" +
               std::to_string(checks_) + " checks hold";
    for (const auto& f : failures_) o.rows += "failed: " + f + "\n";
    return o;
  }

 private:
  uint64_t checks_ = 0;
  uint64_t failed_ = 0;
  std::vector<std::string> failures_;
};

Outcome FromReport(const bench::BenchReport& rep, const std::string& label) {
  Outcome o;
  o.kind = rep.all_pass() ? Outcome::kPass : Outcome::kFail;
  std::ostringstream tsv;
  rep.WriteTsv(tsv);
  o.rows = tsv.str();
  uint64_t gating = 0, passed = 0;
  for (const auto& r : rep.rows) {
    gating += r.gating;
    passed += r.gating && r.pass;
  }
  o.detail = label + ": " + std::to_string(passed) + "/" + std::to_string(gating) +
             " gating rows pass";
  return o;
}

std::vector<uint64_t> Counters(const MpuSketch& sk) {
  std::vector<uint64_t> out;
  const MpuParams& p = sk.params();
  for (size_t k = 0; k < p.p; ++k)
    for (size_t r = 0; r < p.m; ++r)
      for (size_t l = 0; l < p.s; ++l) out.push_back(sk.counter(k, r, l));
  return out;
}

// Structural properties of single sketches over randomized configurations.
Outcome Criterion1() {
  Checker c;
  SplitMix64 rng(101);
  const std::vector<MpuParams> configs = {
      {1, 1, 1, 1}, {2, 8, 16, 100}, {3, 5, 33, 1000}, {4, 16, 64, 65534},
      {2, 4, 8, uint64_t{1} << 40}};
  for (size_t ci = 0; ci < configs.size(); ++ci) {
    const MpuParams& params = configs[ci];
    const std::string tag = "config " + std::to_string(ci) + ": ";
    for (uint64_t seed = 0; seed < 4; ++seed) {
      MpuSketch sk(params, HashSeed{seed});
      const auto fresh = Counters(sk);
      c.Expect(std::all_of(fresh.begin(), fresh.end(),
                           [&](uint64_t v) { return v == params.w + 1; }),
               tag + "fresh counters equal w+1");

      // Random stream, applied one update at a time.
      std::vector<std::pair<uint64_t, uint64_t>> stream;
      for (int n = 0; n < 400; ++n) stream.emplace_back(rng.Below(12), rng.Below(300));
      std::vector<uint64_t> prev = fresh;
      bool touched_ok = true, monotone = true;
      for (const auto& [k, t] : stream) {
        sk.Update(k, t);
        const auto cur = Counters(sk);
        size_t changed = 0;
        for (size_t i = 0; i < cur.size(); ++i) {
          changed += cur[i] != prev[i];
          monotone = monotone && cur[i] <= prev[i];
        }
        touched_ok = touched_ok && changed <= params.p;
        prev = cur;
      }
      c.Expect(touched_ok, tag + "at most p counters change per update");
      c.Expect(monotone, tag + "counters never increase");

      // Permuted stream with duplicates gives the same bytes.
      auto shuffled = stream;
      shuffled.insert(shuffled.end(), stream.begin(), stream.begin() + 100);
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      MpuSketch other(params, HashSeed{seed});
      for (const auto& [k, t] : shuffled) other.Update(k, t);
      c.Expect(other.Serialize() == sk.Serialize(),
               tag + "duplicate and permutation insensitive");

      // Symmetry.
      bool symmetric = true;
      for (uint64_t i = 0; i < 12; ++i)
        for (uint64_t j = 0; j < 12; ++j) {
          const auto a = sk.Estimate(i, j), b = sk.Estimate(j, i);
          symmetric = symmetric && a.estimate == b.estimate && a.a == b.a &&
                      a.b == b.b && a.c == b.c;
        }
      c.Expect(symmetric, tag + "estimate symmetric");

      // Merge of a random split equals the whole.
      MpuSketch left(params, HashSeed{seed}), right(params, HashSeed{seed});
      for (const auto& [k, t] : stream) (rng.Below(2) ? left : right).Update(k, t);
      left.Merge(right);
      c.Expect(left.Serialize() == sk.Serialize(), tag + "merge homomorphism");

      // Serialization round trip.
      std::stringstream buf;
      sk.Save(buf);
      const MpuSketch back = MpuSketch::Load(buf);
      c.Expect(back == sk && back.Serialize() == sk.Serialize(),
               tag + "serialization round trip");
    }
  }
  return c.Finish("structural");
}

Outcome Criterion2() {
  bench::AccuracyScenario sc;
  sc.plan = {0.2, 0.1, 2000, 100, 3};
  sc.planted_cors = {50, 300, 1000};
  sc.trials = 300;
  sc.q = 0.05;
  sc.seed = 20260101;
  return FromReport(bench::RunAccuracy(sc), "median-of-copies failure rate");
}

Outcome Criterion3() {
  bench::VarianceScenario sc;  // s=1024, |T|=5000, Cor=500, 500 trials
  return FromReport(bench::RunVariance(sc), "single-copy bias and variance");
}

Outcome Criterion4() {
  bench::CollisionScenario sc;  // |F|=64, p=2, m in {64,128,256}, 1000 trials
  return FromReport(bench::RunCollision(sc), "row collision rate");
}

Outcome Criterion5() {
  bench::DiscretizationScenario sc;  // s=256, |T|=1024, 500 paired trials
  return FromReport(bench::RunDiscretization(sc), "discrete vs reference phi");
}

Outcome Criterion6() {
  Checker c;
  SplitMix64 rng(606);
  Plan plan;
  plan.s = 32;
  plan.w = 4000;
  plan.m = 16;
  plan.copies = 5;
  plan.p = 3;
  plan.epoch_len = 400;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GroupMap singletons;
    for (uint64_t f = 0; f < 20; ++f) singletons.Assign(f, f);
    MpuEnsemble direct(plan, HashSeed{seed}), grouped(plan, HashSeed{seed});
    for (int n = 0; n < 3000; ++n) {
      const uint64_t f = rng.Below(20), t = rng.Below(400);
      direct.Update(f, t);
      UpdateGroup(grouped, singletons, f, t);
    }
    std::stringstream a, b;
    direct.Save(a);
    grouped.Save(b);
    c.Expect(a.str() == b.str(), "singleton groups bit-equivalent");

    const LagConfig lag = LagConfig::For(7, 0);
    MpuEnsemble plain(plan, HashSeed{seed}), lagged(plan, HashSeed{seed});
    for (int n = 0; n < 500; ++n) {
      const uint64_t t = rng.Below(400);
      plain.Update(lag.virtual_key, t);
      UpdateLagged(lagged, lag, t);
    }
    std::stringstream x, y;
    plain.Save(x);
    lagged.Save(y);
    c.Expect(x.str() == y.str(), "tau=0 lag bit-equivalent");
  }
  Outcome bits = c.Finish("bit-equivalence");
  bench::AdapterScenario sc = bench::AdapterScenario::Default();  // 200 trials
  Outcome mc = FromReport(bench::RunAdapters(sc), "adapter estimates vs oracles");
  Outcome o;
  o.kind = std::max(bits.kind, mc.kind);
  o.detail = bits.detail + "; " + mc.detail;
  o.rows = bits.rows + mc.rows;
  return o;
}

uint64_t BruteCorTau(const std::vector<uint8_t>& fi, const std::vector<uint8_t>& fj,
                     int64_t tau) {
  uint64_t sum = 0;
  for (size_t t = 0; t < fi.size(); ++t)
    for (int64_t w = 0; w <= tau; ++w)
      if (t + w < fj.size()) sum += fi[t] * fj[t + w];
  return sum;
}

Outcome Criterion7() {
  Checker c;
  const std::vector<uint64_t> x{1, 2, 1, 3, 3, 1};
  const FreqStats st = ComputeFreqStats(x);
  c.Expect(st.Freq(1) == 3, "Freq(1) = 3");
  c.Expect(st.Freq(4) == 0, "Freq(4) = 0");
  c.Expect(st.distinct == 3, "|X| = 3");

  SplitMix64 rng(707);
  for (int inst = 0; inst < 100; ++inst) {
    const uint64_t T = 1 + rng.Below(200);
    const double qi = rng.NextDouble(), qj = rng.NextDouble();
    ExactTracker tracker(T);
    std::vector<uint64_t> xi, xj;
    std::vector<uint8_t> fi(T), fj(T);
    for (uint64_t t = 0; t < T; ++t) {
      if (rng.Bernoulli(qi)) { tracker.Record(1, t); xi.push_back(t); fi[t] = 1; }
      if (rng.Bernoulli(qj)) { tracker.Record(2, t); xj.push_back(t); fj[t] = 1; }
    }
    c.Expect(JoinSize(xi, xj) == tracker.Cor(1, 2),
             "join == cor, instance " + std::to_string(inst));
    const int64_t tau = static_cast<int64_t>(rng.Below(12));
    c.Expect(tracker.CorTau(1, 2, tau) == BruteCorTau(fi, fj, tau),
             "cor_tau == brute force, instance " + std::to_string(inst));
  }
  return c.Finish("oracle cross-checks");
}

Outcome Criterion8() {
  Checker c;
  // Reported bytes against the closed form, across counter widths.
  for (uint64_t w : std::vector<uint64_t>{100, 1000, 100000, uint64_t{1} << 40}) {
    Plan plan;
    plan.s = 10;
    plan.w = w;
    plan.m = 7;
    plan.copies = 3;
    plan.p = 2;
    const MpuEnsemble e(plan, HashSeed{1});
    const uint64_t width = static_cast<uint64_t>(CounterWidthBits(w));
    const uint64_t expect = plan.copies * plan.p * plan.m * plan.s * width / 8;
    c.Expect(e.memory_bytes() == expect,
             "ensemble bytes at w=" + std::to_string(w));
    uint64_t sum = 0;
    for (size_t i = 0; i < e.copies(); ++i) sum += e.copy(i).memory_bytes();
    c.Expect(sum == expect, "per-copy bytes sum at w=" + std::to_string(w));
  }
  for (int lg = 4; lg <= 20; ++lg) {
    const uint64_t f = uint64_t{1} << lg;
    const uint64_t p = static_cast<uint64_t>(lg);  // ceil(log2 |F|)
    const Plan plan = MakePlan({0.5, 0.5, 100, f, p});
    u128 mp = 1;
    for (uint64_t k = 0; k < p; ++k) mp *= plan.m;
    c.Expect(mp >= u128{4} * f * f, "m^p >= 4|F|^2 at |F|=2^" + std::to_string(lg));
    // Least such m.
    u128 below = 1;
    for (uint64_t k = 0; k < p; ++k) below *= plan.m - 1;
    c.Expect(plan.m == 1 || below < u128{4} * f * f,
             "m is minimal at |F|=2^" + std::to_string(lg));
  }
  return c.Finish("space accounting");
}

Outcome Criterion9() {
  bench::ThroughputScenario sc;  // 1e7 events, p=4
  const bench::BenchReport rep = bench::RunThroughput(sc);
  Outcome o = FromReport(rep, "update throughput");
  const double rate = sc.target_per_sec / rep.rows.at(0).statistic;
  char buf[96];
  std::snprintf(buf, sizeof buf, "; %.3g updates/s vs target %.3g", rate,
                sc.target_per_sec);
  o.detail += buf;
  // Informative between half the target and the target.
  if (o.kind == Outcome::kPass && rate < sc.target_per_sec) o.kind = Outcome::kWarn;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      Criterion1, Criterion2, Criterion3, Criterion4, Criterion5,
      Criterion6, Criterion7, Criterion8, Criterion9};
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.kind = Outcome::kFail;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* verdict = o.kind == Outcome::kPass   ? "PASS"
                          : o.kind == Outcome::kWarn ? "WARN"
                                                     : "FAIL";
    std::printf("criterion %zu: %s %s (%.1fs)\n", i + 1, verdict, o.detail.c_str(), secs);
    std::istringstream rows(o.rows);
    for (std::string line; std::getline(rows, line);) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    all = all && o.kind != Outcome::kFail;
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
