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

#include "mpu/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>

#include "mpu/adapters.h"
#include "mpu/errors.h"
#include "mpu/hashing.h"
#include "mpu/ingest.h"
#include "mpu/oracle.h"
#include "mpu/rng.h"

namespace mpu::bench {
namespace {

uint64_t TraceSeed(uint64_t base, uint64_t t) { return DeriveSeed(base, 2 * t); }
uint64_t SketchSeed(uint64_t base, uint64_t t) {
  return DeriveSeed(base, 2 * t + 1);
}

uint64_t Key(const std::string& id) { return DigestKey(id); }

void Feed(const SynthTrace& trace, MpuEnsemble& e) {
  for (const SynthEvent& ev : trace.events) {
    e.Update(trace.flow_keys[ev.flow], ev.slot);
  }
}

void Feed(const SynthTrace& trace, MpuSketch& sk) {
  for (const SynthEvent& ev : trace.events) {
    sk.Update(trace.flow_keys[ev.flow], ev.slot);
  }
}

// Each planted endpoint "planted_x" becomes a group of `members` flows
// "planted_x#k"; every event goes to one random member and the sketch sees
// it through the group map. Background flows stay ungrouped.
void FeedGrouped(const SynthTrace& trace, uint64_t members, uint64_t seed,
                 MpuEnsemble& e) {
  SplitMix64 rng(seed);
  GroupMap groups;
  std::vector<std::vector<uint64_t>> member_keys(trace.flow_ids.size());
  for (size_t f = 0; f < trace.flow_ids.size(); ++f) {
    const std::string& id = trace.flow_ids[f];
    if (id.rfind("planted_", 0) != 0) continue;
    for (uint64_t k = 0; k < members; ++k) {
      const uint64_t key = Key(id + "#" + std::to_string(k));
      groups.Assign(key, trace.flow_keys[f]);
      member_keys[f].push_back(key);
    }
  }
  for (const SynthEvent& ev : trace.events) {
    const auto& mk = member_keys[ev.flow];
    const uint64_t key =
        mk.empty() ? trace.flow_keys[ev.flow] : mk[rng.Below(mk.size())];
    UpdateGroup(e, groups, key, ev.slot);
  }
}

// k distinct values from [0, n), partial Fisher-Yates.
std::vector<uint64_t> Choose(SplitMix64& rng, uint64_t n, uint64_t k) {
  std::vector<uint64_t> pool(n);
  for (uint64_t i = 0; i < n; ++i) pool[i] = i;
  for (uint64_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.Below(n - i)]);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::string Num(double x) {
  if (std::isnan(x)) return "-";
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

BenchRow Finish(BenchRow row) {
  row.pass = row.Evaluate();
  return row;
}

// Mean and SE of estimate - truth over trials.
struct Paired {
  std::vector<double> est;
  std::vector<double> diff;
  std::vector<double> truth;
};

BenchRow AccuracyRow(const std::string& scenario, const std::string& check,
                     uint64_t seed, const Paired& d, double se_mult) {
  const SampleStats e = Summarize(d.est);
  const SampleStats df = Summarize(d.diff);
  const SampleStats tr = Summarize(d.truth);
  BenchRow row;
  row.scenario = scenario;
  row.check = check;
  row.trials = d.est.size();
  row.seed = seed;
  row.true_cor = tr.mean;
  row.mean_estimate = e.mean;
  row.bias = df.mean;
  row.sample_variance = df.variance;
  row.statistic = std::fabs(df.mean);
  row.limit = se_mult * df.se();
  row.extra["se_multiplier"] = se_mult;
  return Finish(row);
}

}  // namespace

double SampleStats::sd() const { return std::sqrt(variance); }
double SampleStats::se() const {
  return n == 0 ? kNaN : sd() / std::sqrt(static_cast<double>(n));
}

SampleStats Summarize(std::span<const double> xs) {
  SampleStats st;
  st.n = xs.size();
  if (st.n == 0) return st;
  double sum = 0.0;
  for (double x : xs) sum += x;
  st.mean = sum / static_cast<double>(st.n);
  if (st.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - st.mean) * (x - st.mean);
    st.variance = ss / static_cast<double>(st.n - 1);
  }
  return st;
}

double BinomialSe(double p, uint64_t n) {
  if (n == 0) return kNaN;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

bool BenchReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const BenchRow& r) { return r.pass || !r.gating; });
}

void BenchReport::Append(const BenchReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

nlohmann::json BenchReport::ToJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchRow& r : rows) {
    auto num = [](double x) -> nlohmann::json {
      if (std::isnan(x)) return nullptr;
      return x;
    };
    arr.push_back({{"scenario", r.scenario},
                   {"check", r.check},
                   {"trials", r.trials},
                   {"seed", r.seed},
                   {"true_cor", num(r.true_cor)},
                   {"mean_estimate", num(r.mean_estimate)},
                   {"bias", num(r.bias)},
                   {"sample_variance", num(r.sample_variance)},
                   {"variance_bound", num(r.variance_bound)},
                   {"failure_rate", num(r.failure_rate)},
                   {"error_threshold", num(r.error_threshold)},
                   {"delta", num(r.delta)},
                   {"statistic", num(r.statistic)},
                   {"limit", num(r.limit)},
                   {"verdict", r.pass ? "PASS" : "FAIL"},
                   {"gating", r.gating},
                   {"extra", r.extra}});
  }
  return {{"rows", arr}, {"all_pass", all_pass()}};
}

void BenchReport::WriteTsv(std::ostream& out) const {
  out << "scenario\tcheck\ttrials\tseed\ttrue_cor\tmean_estimate\tbias\t"
         "sample_variance\tvariance_bound\tfailure_rate\terror_threshold\t"
         "delta\tstatistic\tlimit\tverdict\tgating\textra\n";
  for (const BenchRow& r : rows) {
    out << r.scenario << '\t' << r.check << '\t' << r.trials << '\t' << r.seed
        << '\t' << Num(r.true_cor) << '\t' << Num(r.mean_estimate) << '\t'
        << Num(r.bias) << '\t' << Num(r.sample_variance) << '\t'
        << Num(r.variance_bound) << '\t' << Num(r.failure_rate) << '\t'
        << Num(r.error_threshold) << '\t' << Num(r.delta) << '\t'
        << Num(r.statistic) << '\t' << Num(r.limit) << '\t'
        << (r.pass ? "PASS" : "FAIL") << '\t' << (r.gating ? "yes" : "no")
        << '\t' << r.extra.dump() << '\n';
  }
}

void CheckTrials(uint64_t trials) {
  if (trials < kMinTrials) {
    throw InvalidArgument("bench needs at least " + std::to_string(kMinTrials) +
                          " trials, got " + std::to_string(trials));
  }
}

BenchReport RunAccuracy(const AccuracyScenario& sc) {
  CheckTrials(sc.trials);
  if (sc.plan.flow_count < 2) {
    throw InvalidArgument("accuracy scenario needs at least two flows");
  }
  const Plan plan = MakePlan(sc.plan);
  BenchReport report;
  for (size_t cell = 0; cell < sc.planted_cors.size(); ++cell) {
    const uint64_t planted = sc.planted_cors[cell];
    const uint64_t base = DeriveSeed(sc.seed, cell);
    SynthSpec spec;
    spec.flow_count = sc.plan.flow_count - 2;
    spec.epoch_len = sc.plan.epoch_len;
    spec.q = sc.q;
    spec.pairs = {{"planted_i", "planted_j", planted}};
    spec.Validate();

    Paired d;
    uint64_t failures = 0;
    double threshold_sum = 0.0;
    for (uint64_t t = 0; t < sc.trials; ++t) {
      spec.seed = TraceSeed(base, t);
      const SynthTrace trace = GenerateTrace(spec);
      const uint64_t cor = ComputeTruth(spec, trace).at(0).cor;
      MpuEnsemble e(plan, HashSeed{SketchSeed(base, t)});
      if (sc.group_members <= 1) {
        Feed(trace, e);
      } else {
        FeedGrouped(trace, sc.group_members, DeriveSeed(spec.seed, 1), e);
      }
      const double est =
          e.EstimateMedian(Key("planted_i"), Key("planted_j")).ToDouble();
      const double thr = sc.plan.epsilon *
                         std::sqrt(static_cast<double>(cor) *
                                   static_cast<double>(sc.plan.epoch_len));
      threshold_sum += thr;
      if (std::fabs(est - static_cast<double>(cor)) >= thr) ++failures;
      d.est.push_back(est);
      d.truth.push_back(static_cast<double>(cor));
      d.diff.push_back(est - static_cast<double>(cor));
    }
    const double n = static_cast<double>(sc.trials);
    BenchRow row;
    row.scenario = sc.group_members <= 1 ? "accuracy" : "accuracy_grouped";
    row.check = "failure_rate cor=" + std::to_string(planted);
    row.trials = sc.trials;
    row.seed = base;
    row.true_cor = Summarize(d.truth).mean;
    row.mean_estimate = Summarize(d.est).mean;
    row.bias = Summarize(d.diff).mean;
    row.sample_variance = Summarize(d.diff).variance;
    row.failure_rate = static_cast<double>(failures) / n;
    row.error_threshold = threshold_sum / n;
    row.delta = sc.plan.delta;
    row.statistic = row.failure_rate;
    row.limit = sc.plan.delta + 3.0 * BinomialSe(sc.plan.delta, sc.trials);
    row.extra = {{"s", plan.s},         {"w", plan.w},
                 {"m", plan.m},         {"p", plan.p},
                 {"copies", plan.copies}, {"q", sc.q},
                 {"failures", failures}, {"group_members", sc.group_members}};
    report.rows.push_back(Finish(row));
  }
  return report;
}

namespace {

BenchReport VarianceCell(const VarianceScenario& sc, double q, uint64_t cell,
                         bool gating) {
  const double f = static_cast<double>(sc.flow_count);
  const u128 target =
      static_cast<u128>(std::ceil(f * f / (2.0 * sc.collision_target)));
  const uint64_t m = IntegerRootCeil(target, sc.p);
  const uint64_t t2 = sc.epoch_len * sc.epoch_len;
  const uint64_t w = (5 * t2 + sc.s - 1) / sc.s;
  const MpuParams params{sc.p, m, sc.s, w};
  params.Validate();

  SynthSpec spec;
  spec.flow_count = sc.flow_count - 2;
  spec.epoch_len = sc.epoch_len;
  spec.q = q;
  spec.pairs = {{"planted_i", "planted_j", sc.planted_cor}};
  spec.background_on_planted = false;
  spec.Validate();

  const uint64_t base = DeriveSeed(sc.seed, cell);
  Paired d;
  for (uint64_t t = 0; t < sc.trials; ++t) {
    spec.seed = TraceSeed(base, t);
    const SynthTrace trace = GenerateTrace(spec);
    const uint64_t cor = ComputeTruth(spec, trace).at(0).cor;
    MpuSketch sk(params, HashSeed{SketchSeed(base, t)});
    Feed(trace, sk);
    const double est = sk.Estimate(Key("planted_i"), Key("planted_j")).value();
    d.est.push_back(est);
    d.truth.push_back(static_cast<double>(cor));
    d.diff.push_back(est - static_cast<double>(cor));
  }
  const nlohmann::json extra = {
      {"s", sc.s},
      {"w", w},
      {"m", m},
      {"p", sc.p},
      {"q", q},
      {"collision_bound", f * f / (2.0 * std::pow(static_cast<double>(m),
                                                  static_cast<double>(sc.p)))}};
  const std::string suffix = gating ? "" : " background_q=" + Num(q);
  BenchReport report;
  BenchRow bias = AccuracyRow("variance", "bias" + suffix, base, d, 4.0);
  bias.gating = gating;
  bias.extra.update(extra);
  report.rows.push_back(bias);

  const SampleStats e = Summarize(d.est);
  BenchRow var = bias;
  var.check = "variance" + suffix;
  var.sample_variance = e.variance;
  var.variance_bound = static_cast<double>(sc.planted_cor) *
                       static_cast<double>(sc.epoch_len) /
                       static_cast<double>(sc.s);
  var.statistic = e.variance;
  var.limit = sc.variance_slack * var.variance_bound;
  var.extra = extra;
  var.extra["slack"] = sc.variance_slack;
  report.rows.push_back(Finish(var));
  return report;
}

}  // namespace

BenchReport RunVariance(const VarianceScenario& sc) {
  CheckTrials(sc.trials);
  if (sc.flow_count < 2) throw InvalidArgument("need at least two flows");
  if (!(sc.collision_target > 0.0)) {
    throw InvalidArgument("collision target must be positive");
  }
  BenchReport report = VarianceCell(sc, sc.q, 0, true);
  if (sc.informative_q >= 0.0) {
    report.Append(VarianceCell(sc, sc.informative_q, 1, false));
  }
  return report;
}

BenchReport RunCollision(const CollisionScenario& sc) {
  CheckTrials(sc.trials);
  if (sc.p == 0 || sc.p > 64) throw InvalidArgument("p must be in [1, 64]");
  std::vector<uint64_t> keys(sc.flow_count);
  for (uint64_t i = 0; i < sc.flow_count; ++i) {
    keys[i] = Key("f" + std::to_string(i));
  }
  BenchReport report;
  std::vector<double> rates;
  for (size_t cell = 0; cell < sc.ms.size(); ++cell) {
    const uint64_t m = sc.ms[cell];
    if (m == 0) throw InvalidArgument("m must be positive");
    const uint64_t base = DeriveSeed(sc.seed, cell);
    uint64_t hits = 0;
    std::set<std::vector<uint64_t>> seen;
    for (uint64_t t = 0; t < sc.trials; ++t) {
      const HashSeed seed{SketchSeed(base, t)};
      std::vector<PairwiseHash> rows;
      for (uint64_t k = 0; k < sc.p; ++k) rows.push_back(NewPairwise(seed, k, m));
      seen.clear();
      bool collided = false;
      for (uint64_t key : keys) {
        std::vector<uint64_t> sig(sc.p);
        for (uint64_t k = 0; k < sc.p; ++k) sig[k] = rows[k].Bucket(key);
        if (!seen.insert(std::move(sig)).second) {
          collided = true;
          break;
        }
      }
      hits += collided;
    }
    const double f = static_cast<double>(sc.flow_count);
    const double bound =
        f * f /
        (2.0 * std::pow(static_cast<double>(m), static_cast<double>(sc.p)));
    BenchRow row;
    row.scenario = "collision";
    row.check = "rate m=" + std::to_string(m);
    row.trials = sc.trials;
    row.seed = base;
    row.failure_rate = static_cast<double>(hits) / static_cast<double>(sc.trials);
    row.statistic = row.failure_rate;
    row.limit = bound + 4.0 * BinomialSe(std::min(bound, 1.0), sc.trials);
    row.extra = {{"bound", bound}, {"flows", sc.flow_count}, {"p", sc.p},
                 {"m", m}, {"collisions", hits}};
    rates.push_back(row.failure_rate);
    report.rows.push_back(Finish(row));
  }
  if (sc.ms.size() > 1) {
    uint64_t violations = 0;
    for (size_t i = 1; i < rates.size(); ++i) {
      if (!(rates[i] < rates[i - 1])) ++violations;
    }
    BenchRow row;
    row.scenario = "collision";
    row.check = "strictly_decreasing_in_m";
    row.trials = sc.trials;
    row.seed = sc.seed;
    row.statistic = static_cast<double>(violations);
    row.limit = 0.0;
    row.extra = {{"rates", rates}};
    report.rows.push_back(Finish(row));
  }
  return report;
}

BenchReport RunDiscretization(const DiscretizationScenario& sc) {
  CheckTrials(sc.trials);
  SynthSpec spec;
  spec.flow_count = 0;
  spec.epoch_len = sc.epoch_len;
  spec.q = sc.q;
  spec.pairs = {{"planted_i", "planted_j", sc.planted_cor}};
  spec.Validate();
  const uint64_t ki = Key("planted_i");
  const uint64_t kj = Key("planted_j");
  const double t2 = static_cast<double>(sc.epoch_len) *
                    static_cast<double>(sc.epoch_len);

  BenchReport report;
  for (size_t cell = 0; cell < sc.bounds.size(); ++cell) {
    if (!(sc.bounds[cell] > 0.0)) throw InvalidArgument("bound must be > 0");
    const uint64_t w = static_cast<uint64_t>(std::llround(
        t2 / (2.0 * static_cast<double>(sc.s) * sc.bounds[cell])));
    const MpuParams coarse{sc.p, sc.m, sc.s, std::max<uint64_t>(w, 1)};
    const MpuParams fine{sc.p, sc.m, sc.s, sc.reference_w};
    coarse.Validate();
    fine.Validate();
    const double bound =
        t2 / (2.0 * static_cast<double>(coarse.w) * static_cast<double>(sc.s));
    const uint64_t base = DeriveSeed(sc.seed, cell);

    uint64_t worse = 0;
    uint64_t raw_worse = 0;
    uint64_t a_changed = 0;
    Paired d;
    for (uint64_t t = 0; t < sc.trials; ++t) {
      spec.seed = TraceSeed(base, t);
      const SynthTrace trace = GenerateTrace(spec);
      const double cor = static_cast<double>(ComputeTruth(spec, trace).at(0).cor);
      const HashSeed seed{SketchSeed(base, t)};
      MpuSketch dk(coarse, seed);
      MpuSketch rf(fine, seed);
      Feed(trace, dk);
      Feed(trace, rf);
      const EstimateBreakdown ed = dk.Estimate(ki, kj);
      const EstimateBreakdown er = rf.Estimate(ki, kj);
      const double ref_err = std::fabs(er.value() - cor);
      // Reference estimate with the discrete run's agreement count.
      const double swapped =
          er.b == 0 ? 0.0
                    : static_cast<double>(er.w) * static_cast<double>(ed.a) *
                          static_cast<double>(er.b) / static_cast<double>(er.c);
      worse += std::fabs(swapped - cor) > ref_err;
      raw_worse += std::fabs(ed.value() - cor) > ref_err;
      a_changed += ed.a != er.a;
      d.est.push_back(ed.value());
      d.truth.push_back(cor);
      d.diff.push_back(ed.value() - cor);
    }
    const double n = static_cast<double>(sc.trials);
    BenchRow row;
    row.scenario = "discretization";
    row.check = "worse_rate w=" + std::to_string(coarse.w);
    row.trials = sc.trials;
    row.seed = base;
    row.true_cor = Summarize(d.truth).mean;
    row.mean_estimate = Summarize(d.est).mean;
    row.bias = Summarize(d.diff).mean;
    row.failure_rate = static_cast<double>(worse) / n;
    row.statistic = row.failure_rate;
    row.limit = bound + 3.0 * BinomialSe(std::min(bound, 1.0), sc.trials);
    row.extra = {{"w", coarse.w},
                 {"reference_w", sc.reference_w},
                 {"bound", bound},
                 {"s", sc.s},
                 {"raw_worse_rate", static_cast<double>(raw_worse) / n},
                 {"agreement_changed_rate", static_cast<double>(a_changed) / n}};
    report.rows.push_back(Finish(row));
  }
  return report;
}

AdapterScenario AdapterScenario::Default() {
  AdapterScenario sc;
  // Background flows plus the handful of keys each sub-scenario adds.
  sc.plan = MakePlan({0.1, 0.1, sc.epoch_len, sc.flow_count + 8, 3});
  return sc;
}

namespace {

// Background flows "f0".. active i.i.d. with probability q per slot.
void AddBackground(const AdapterScenario& sc, SplitMix64& rng,
                   MpuEnsemble& e) {
  for (uint64_t f = 0; f < sc.flow_count; ++f) {
    const uint64_t key = Key("f" + std::to_string(f));
    for (uint64_t t = 0; t < sc.epoch_len; ++t) {
      if (rng.Bernoulli(sc.q)) e.Update(key, t);
    }
  }
}

// Groups of three and two members. Each group's union is exactly the same
// set S of `group_cor` slots: every slot of S goes to one random member, and
// members also pick up other slots of S with probability 1/3.
double GroupTrial(const AdapterScenario& sc, uint64_t trace_seed,
                  uint64_t sketch_seed, double* truth) {
  SplitMix64 rng(trace_seed);
  const std::vector<uint64_t> shared =
      Choose(rng, sc.epoch_len, sc.group_cor);
  GroupMap groups;
  ExactTracker oracle(sc.epoch_len);
  MpuEnsemble e(sc.plan, HashSeed{sketch_seed});
  std::vector<uint64_t> members[2];
  for (int g = 0; g < 2; ++g) {
    const std::string gname = g == 0 ? "group_a" : "group_b";
    const uint64_t size = g == 0 ? 3 : 2;
    for (uint64_t k = 0; k < size; ++k) {
      const uint64_t key = Key(gname + "_m" + std::to_string(k));
      groups.Assign(key, Key(gname));
      members[g].push_back(key);
    }
    for (uint64_t slot : shared) {
      const uint64_t owner = rng.Below(size);
      for (uint64_t k = 0; k < size; ++k) {
        if (k == owner || rng.Below(3) == 0) {
          oracle.Record(members[g][k], slot);
          UpdateGroup(e, groups, members[g][k], slot);
        }
      }
    }
  }
  AddBackground(sc, rng, e);
  *truth = static_cast<double>(oracle.GCorAny(members[0], members[1]));
  return e.EstimateMedian(Key("group_a"), Key("group_b")).ToDouble();
}

// Two services hit by the same (source, slot) tuples in `related_cor`
// slots; background services draw sources from the same pool.
double RelatedTrial(const AdapterScenario& sc, uint64_t trace_seed,
                    uint64_t sketch_seed, double* truth) {
  constexpr uint64_t kSources = 64;
  SplitMix64 rng(trace_seed);
  const std::vector<uint64_t> shared =
      Choose(rng, sc.epoch_len, sc.related_cor);
  ExactTracker oracle;
  MpuEnsemble e(sc.plan, HashSeed{sketch_seed});
  const uint64_t x = Key("service_x");
  const uint64_t y = Key("service_y");
  for (uint64_t slot : shared) {
    const uint64_t src = Key("src" + std::to_string(rng.Below(kSources)));
    for (uint64_t svc : {x, y}) {
      oracle.RecordType(svc, TupleKey(src, slot));
      UpdateRelated(e, svc, src, slot);
    }
  }
  for (uint64_t f = 0; f < sc.flow_count; ++f) {
    const uint64_t key = Key("f" + std::to_string(f));
    for (uint64_t t = 0; t < sc.epoch_len; ++t) {
      if (!rng.Bernoulli(sc.q)) continue;
      const uint64_t src = Key("src" + std::to_string(rng.Below(kSources)));
      UpdateRelated(e, key, src, t);
    }
  }
  *truth = static_cast<double>(oracle.Cor(x, y));
  return e.EstimateMedian(x, y).ToDouble();
}

// Slots are cut into blocks of tau + 1. In lag_cor / (tau + 1) random blocks
// flow i is active throughout and flow j only in the last slot, so every
// slot of i sees exactly one activity of j within its lag window.
double LagTrial(const AdapterScenario& sc, uint64_t trace_seed,
                uint64_t sketch_seed, double* truth, double* union_truth) {
  SplitMix64 rng(trace_seed);
  const uint64_t len = static_cast<uint64_t>(sc.tau) + 1;
  const std::vector<uint64_t> blocks =
      Choose(rng, sc.epoch_len / len, sc.lag_cor / len);
  ExactTracker oracle(sc.epoch_len);
  MpuEnsemble e(sc.plan, HashSeed{sketch_seed});
  const uint64_t ki = Key("lag_i");
  const uint64_t kj = Key("lag_j");
  const LagConfig lag = LagConfig::For(kj, sc.tau);
  for (uint64_t b : blocks) {
    for (uint64_t t = b * len; t < (b + 1) * len; ++t) {
      oracle.Record(ki, t);
      e.Update(ki, t);
    }
    const uint64_t tj = (b + 1) * len - 1;
    oracle.Record(kj, tj);
    e.Update(kj, tj);
    UpdateLagged(e, lag, tj);
  }
  AddBackground(sc, rng, e);
  *truth = static_cast<double>(oracle.CorTau(ki, kj, sc.tau));
  *union_truth = static_cast<double>(oracle.LaggedUnionCor(ki, kj, sc.tau));
  return e.EstimateMedian(ki, lag.virtual_key).ToDouble();
}

}  // namespace

BenchReport RunAdapters(const AdapterScenario& sc) {
  CheckTrials(sc.trials);
  sc.plan.Validate();
  if (sc.tau < 0) throw InvalidArgument("tau must be >= 0");
  const uint64_t len = static_cast<uint64_t>(sc.tau) + 1;
  if (sc.group_cor > sc.epoch_len || sc.related_cor > sc.epoch_len ||
      sc.lag_cor % len != 0 || sc.lag_cor > sc.epoch_len / len * len) {
    throw InvalidArgument("adapter scenario does not fit the epoch");
  }
  const nlohmann::json extra = {{"s", sc.plan.s}, {"w", sc.plan.w},
                                {"m", sc.plan.m}, {"p", sc.plan.p},
                                {"copies", sc.plan.copies}, {"q", sc.q},
                                {"background_flows", sc.flow_count}};
  BenchReport report;
  Paired group, related, lagged;
  uint64_t lag_union_mismatch = 0;
  const uint64_t bg = DeriveSeed(sc.seed, 0);
  const uint64_t br = DeriveSeed(sc.seed, 1);
  const uint64_t bl = DeriveSeed(sc.seed, 2);
  for (uint64_t t = 0; t < sc.trials; ++t) {
    double truth = 0.0;
    double est = GroupTrial(sc, TraceSeed(bg, t), SketchSeed(bg, t), &truth);
    group.est.push_back(est);
    group.truth.push_back(truth);
    group.diff.push_back(est - truth);

    est = RelatedTrial(sc, TraceSeed(br, t), SketchSeed(br, t), &truth);
    related.est.push_back(est);
    related.truth.push_back(truth);
    related.diff.push_back(est - truth);

    double union_truth = 0.0;
    est = LagTrial(sc, TraceSeed(bl, t), SketchSeed(bl, t), &truth,
                   &union_truth);
    lag_union_mismatch += union_truth != truth;
    lagged.est.push_back(est);
    lagged.truth.push_back(truth);
    lagged.diff.push_back(est - truth);
  }
  BenchRow row = AccuracyRow("adapters", "group_any", bg, group, 4.0);
  row.extra.update(extra);
  report.rows.push_back(row);
  row = AccuracyRow("adapters", "related_tuple", br, related, 4.0);
  row.extra.update(extra);
  report.rows.push_back(row);
  row = AccuracyRow("adapters", "lagged tau=" + std::to_string(sc.tau), bl,
                    lagged, 4.0);
  row.extra.update(extra);
  row.extra["union_mismatch_trials"] = lag_union_mismatch;
  report.rows.push_back(row);
  return report;
}

BenchReport RunThroughput(const ThroughputScenario& sc) {
  if (sc.events == 0 || sc.flows == 0) {
    throw InvalidArgument("throughput needs events and flows");
  }
  const MpuParams params{sc.p, sc.m, sc.s, sc.w};
  params.Validate();
  std::vector<uint64_t> keys(sc.flows);
  for (uint64_t i = 0; i < sc.flows; ++i) keys[i] = Key("f" + std::to_string(i));
  SplitMix64 rng(DeriveSeed(sc.seed, 0));
  std::vector<std::pair<uint64_t, uint64_t>> events(sc.events);
  for (auto& ev : events) {
    ev = {keys[rng.Below(sc.flows)], rng.Below(sc.epoch_len)};
  }
  std::sort(events.begin(), events.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  MpuSketch sk(params, HashSeed{DeriveSeed(sc.seed, 1)},
               SketchOptions{sc.epoch_len, kDefaultSketchMemoryCap});
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [key, slot] : events) sk.Update(key, slot);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const double rate = static_cast<double>(sc.events) / std::max(secs, 1e-9);

  BenchRow row;
  row.scenario = "throughput";
  row.check = "updates_per_sec";
  row.trials = 1;
  row.seed = sc.seed;
  // Shortfall factor; only a shortfall beyond 2x fails.
  row.statistic = sc.target_per_sec / rate;
  row.limit = 2.0;
  row.extra = {{"events", sc.events},
               {"seconds", secs},
               {"updates_per_sec", rate},
               {"target_per_sec", sc.target_per_sec},
               {"below_target", rate < sc.target_per_sec},
               {"p", sc.p},
               {"counter_bits", sk.counter_width_bits()},
               {"checksum", sk.counter(0, 0, 0)}};
  BenchReport report;
  report.rows.push_back(Finish(row));
  return report;
}

}  // namespace mpu::bench
