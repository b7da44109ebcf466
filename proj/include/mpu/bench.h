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

// Monte-Carlo harness checking the estimator's accuracy guarantees against
// the exact tracker. Every scenario derives all randomness from one seed.
// Cell c of a sweep uses base = DeriveSeed(seed, c); its trial t draws the
// trace from DeriveSeed(base, 2t) and the sketches from DeriveSeed(base, 2t+1).
//
// Each check produces one BenchRow whose verdict is `statistic <= limit`,
// so reports can be re-judged offline from the numbers alone. Rows marked
// non-gating are informative and do not affect all_pass().
//
// Discretization check. The same master seed gives the discrete sketch
// (range w) and a near-continuous reference (range 2^32 - 1) identical
// h_k, g and phi coefficients; phi at range w is a coarsening of phi at the
// reference range. A trial counts as "discreteness decreased accuracy" when
// substituting the discrete run's agreement count a into the reference
// estimate strictly increases the reference's absolute error. This isolates
// phi ties from the unrelated rounding of the min-sum c. The literal
// comparison of the two runs' absolute errors is reported alongside as
// `raw_worse_rate` but does not gate.

#ifndef MPU_BENCH_H_
#define MPU_BENCH_H_

#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpu/estimator.h"

namespace mpu::bench {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SampleStats {
  uint64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double sd() const;
  double se() const;      // sd / sqrt(n)
};

SampleStats Summarize(std::span<const double> xs);

// Binomial standard error sqrt(p(1-p)/n).
double BinomialSe(double p, uint64_t n);

struct BenchRow {
  std::string scenario;
  std::string check;
  uint64_t trials = 0;
  uint64_t seed = 0;
  double true_cor = kNaN;
  double mean_estimate = kNaN;
  double bias = kNaN;
  double sample_variance = kNaN;
  double variance_bound = kNaN;  // Cor * |T| / s
  double failure_rate = kNaN;
  double error_threshold = kNaN;  // eps * sqrt(Cor * |T|)
  double delta = kNaN;
  double statistic = kNaN;
  double limit = kNaN;
  bool pass = false;
  bool gating = true;
  nlohmann::json extra = nlohmann::json::object();

  // statistic <= limit.
  bool Evaluate() const { return statistic <= limit; }
};

struct BenchReport {
  std::vector<BenchRow> rows;

  bool all_pass() const;
  nlohmann::json ToJson() const;
  void WriteTsv(std::ostream& out) const;
  void Append(const BenchReport& other);
};

inline constexpr uint32_t kMinTrials = 30;

// Rejects trials < kMinTrials with InvalidArgument.
void CheckTrials(uint64_t trials);

// Median-of-copies failure rate at a planned (eps, delta).
struct AccuracyScenario {
  PlanInput plan;
  std::vector<uint64_t> planted_cors;
  uint64_t trials = 300;
  double q = 0.05;  // background activity of every flow
  // > 1: each planted endpoint is a group of this many member flows, fed
  // through the group adapter, with every event on one random member.
  uint64_t group_members = 1;
  uint64_t seed = 1;
};
BenchReport RunAccuracy(const AccuracyScenario& sc);

// Bias and variance of single-copy estimates with row collisions made
// negligible.
struct VarianceScenario {
  uint64_t s = 1024;
  uint64_t epoch_len = 5000;
  uint64_t planted_cor = 500;
  uint64_t trials = 500;
  uint64_t p = 2;
  uint64_t flow_count = 32;
  // Background activity. The gating cell keeps the planted pair alone in
  // its rows; a second, non-gating cell at informative_q (skipped when
  // negative) shows the bias that rows shared with active flows add.
  double q = 0.0;
  double informative_q = 0.05;
  double collision_target = 1e-3;
  double variance_slack = 1.5;
  uint64_t seed = 2;
};
BenchReport RunVariance(const VarianceScenario& sc);

// Probability that two of |F| flows share all p rows.
struct CollisionScenario {
  uint64_t flow_count = 64;
  uint64_t p = 2;
  std::vector<uint64_t> ms = {64, 128, 256};
  uint64_t trials = 1000;
  uint64_t seed = 3;
};
BenchReport RunCollision(const CollisionScenario& sc);

// Discrete vs near-continuous phi, paired by seed.
struct DiscretizationScenario {
  uint64_t s = 256;
  uint64_t epoch_len = 1024;
  std::vector<double> bounds = {0.5, 0.1, 0.02};  // |T|^2 / (2 w s)
  uint64_t reference_w = 0xffffffffULL;
  uint64_t trials = 500;
  uint64_t planted_cor = 256;
  double q = 0.25;
  uint64_t p = 2;
  uint64_t m = 64;
  uint64_t seed = 4;
};
BenchReport RunDiscretization(const DiscretizationScenario& sc);

// Group, related-service and lagged reductions against their oracles.
struct AdapterScenario {
  uint64_t trials = 200;
  uint64_t epoch_len = 2000;
  uint64_t flow_count = 100;
  double q = 0.05;  // background population
  Plan plan;        // shared by the three sub-scenarios
  uint64_t group_cor = 150;
  uint64_t related_cor = 120;
  uint64_t lag_cor = 250;
  int64_t tau = 4;
  uint64_t seed = 5;

  // Planner output for eps = 0.1, delta = 0.1, p = 3 at this |T| and |F|.
  static AdapterScenario Default();
};
BenchReport RunAdapters(const AdapterScenario& sc);

// Single-threaded sketch update rate.
struct ThroughputScenario {
  uint64_t events = 10'000'000;
  uint64_t p = 4;
  uint64_t m = 1024;
  uint64_t s = 1024;
  uint64_t w = 65534;
  uint64_t flows = 100'000;
  uint64_t epoch_len = 100'000;
  double target_per_sec = 1e6;
  uint64_t seed = 6;
};
BenchReport RunThroughput(const ThroughputScenario& sc);

}  // namespace mpu::bench

#endif  // MPU_BENCH_H_
