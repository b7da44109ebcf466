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

// mpu: command-line front end.
//
//   mpu synth   generate a synthetic trace and its truth table
//   mpu track   plan an ensemble and stream a trace into it
//   mpu query   estimate pair correlations from an ensemble file
//   mpu bench   Monte-Carlo checks of the accuracy bounds
//   mpu oracle  exact correlations from a trace
//
// Exit codes: 0 ok, 1 a bench bound failed, 2 bad input or usage,
// 3 the sketch rejected a trace record, or an internal error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mpu/adapters.h"
#include "mpu/bench.h"
#include "mpu/errors.h"
#include "mpu/estimator.h"
#include "mpu/hashing.h"
#include "mpu/ingest.h"
#include "mpu/kernels.h"
#include "mpu/oracle.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBenchFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

using mpu::u128;

// Usage problems detected after CLI11 parsing.
struct UsageError : mpu::Error {
  using mpu::Error::Error;
};

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::pair<std::string, std::string> ParsePair(const std::string& s) {
  const auto parts = Split(s, ':');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    throw UsageError("expected a pair of the form a:b, got '" + s + "'");
  }
  return {parts[0], parts[1]};
}

mpu::PlantedPair ParsePlanted(const std::string& s) {
  const auto parts = Split(s, ':');
  if (parts.size() != 3 || parts[0].empty() || parts[1].empty()) {
    throw UsageError("expected --pair i:j:N, got '" + s + "'");
  }
  size_t used = 0;
  uint64_t n = 0;
  try {
    n = std::stoull(parts[2], &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != parts[2].size() || parts[2].empty() || parts[2][0] == '-') {
    throw UsageError("bad shared count in '" + s + "'");
  }
  return {parts[0], parts[1], n};
}

std::ifstream OpenIn(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw mpu::FormatError("cannot open " + path);
  return in;
}

// Writes through a stream that is either stdout or a file.
class Output {
 public:
  explicit Output(const std::string& path, bool binary = false) {
    if (path.empty() || path == "-") {
      out_ = &std::cout;
    } else {
      file_ = std::make_unique<std::ofstream>(
          path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
      if (!*file_) throw mpu::FormatError("cannot write " + path);
      out_ = file_.get();
    }
  }
  std::ostream& get() { return *out_; }
  void Close() {
    out_->flush();
    if (!*out_) throw mpu::FormatError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_ = nullptr;
};

void PrintSeed(const std::string& cmd, uint64_t seed) {
  std::cerr << "# " << cmd << " seed=" << seed << '\n';
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  uint64_t flows = 100;
  uint64_t epoch = 1000;
  std::vector<std::string> pairs;
  double q = 0.0;
  uint64_t seed = 1;
  std::string out;
  std::string truth;
};

int RunSynth(const SynthArgs& a) {
  mpu::SynthSpec spec;
  spec.flow_count = a.flows;
  spec.epoch_len = a.epoch;
  spec.q = a.q;
  spec.seed = a.seed;
  for (const auto& p : a.pairs) spec.pairs.push_back(ParsePlanted(p));
  spec.Validate();
  PrintSeed("synth", a.seed);
  const mpu::SynthTrace trace = mpu::GenerateTrace(spec);
  Output out(a.out);
  mpu::WriteTrace(out.get(), trace);
  out.Close();
  if (!a.truth.empty()) {
    Output t(a.truth);
    mpu::WriteTruth(t.get(), mpu::ComputeTruth(spec, trace));
    t.Close();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- track

struct TraceArgs {
  std::string trace;
  uint64_t epoch = 0;  // 0: take it from the header
  uint64_t slot_width = 1;
  int64_t epoch_start = 0;
  double max_error_rate = 0.05;
};

mpu::SlotConfig MakeSlotConfig(const TraceArgs& a) {
  mpu::SlotConfig cfg;
  cfg.slot_width = a.slot_width;
  cfg.epoch_start = a.epoch_start;
  if (a.epoch != 0) cfg.epoch_len = a.epoch;
  cfg.Validate();
  return cfg;
}

mpu::ParseOptions MakeParseOptions(const TraceArgs& a) {
  if (!(a.max_error_rate >= 0.0 && a.max_error_rate <= 1.0)) {
    throw UsageError("--max-error-rate must lie in [0, 1]");
  }
  mpu::ParseOptions o;
  o.max_error_rate = a.max_error_rate;
  return o;
}

mpu::AdapterMode ParseMode(const std::string& s) {
  if (s == "flow") return mpu::AdapterMode::kFlow;
  if (s == "group") return mpu::AdapterMode::kGroup;
  if (s == "related") return mpu::AdapterMode::kRelated;
  if (s == "lagged") return mpu::AdapterMode::kLagged;
  throw UsageError("unknown mode '" + s + "'");
}

std::optional<mpu::GroupMap> LoadGroups(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in = OpenIn(path);
  return mpu::GroupMap::LoadNdjson(in);
}

struct TrackArgs {
  TraceArgs trace;
  double epsilon = 0.1;
  double delta = 0.1;
  uint64_t p = 3;
  uint64_t seed = 1;
  uint64_t flows = 0;  // 0: count distinct keys in a first pass
  std::string mode = "flow";
  int64_t tau = 0;
  std::string groups;
  uint64_t memory_cap = mpu::kDefaultPlanMemoryCap;
  std::string out;
  bool json = false;
};

// Distinct sketch keys the chosen mode will create.
uint64_t CountKeys(const TrackArgs& a, const mpu::AdapterConfig& adapter) {
  std::ifstream in = OpenIn(a.trace.trace);
  mpu::TraceReader reader(in, MakeSlotConfig(a.trace), MakeParseOptions(a.trace));
  std::unordered_set<uint64_t> keys;
  while (const auto ev = reader.Next()) {
    uint64_t key = ev->flow;
    if (adapter.mode == mpu::AdapterMode::kGroup) {
      if (ev->group) {
        key = *ev->group;
      } else if (adapter.groups != nullptr) {
        key = adapter.groups->Find(ev->flow).value_or(ev->flow);
      }
    }
    keys.insert(key);
  }
  uint64_t n = keys.size();
  if (adapter.mode == mpu::AdapterMode::kLagged) n *= 2;  // virtual keys
  return std::max<uint64_t>(n, 1);
}

int RunTrack(const TrackArgs& a) {
  if (a.out.empty()) throw UsageError("track needs --out");
  mpu::AdapterConfig adapter;
  adapter.mode = ParseMode(a.mode);
  if (adapter.mode != mpu::AdapterMode::kLagged && a.tau != 0) {
    throw UsageError("--tau applies to --mode lagged only");
  }
  if (a.tau < 0) throw UsageError("--tau must be >= 0");
  if (adapter.mode != mpu::AdapterMode::kGroup && !a.groups.empty()) {
    throw UsageError("--groups applies to --mode group only");
  }
  adapter.tau = a.tau;
  const std::optional<mpu::GroupMap> groups = LoadGroups(a.groups);
  if (groups) adapter.groups = &*groups;

  PrintSeed("track", a.seed);
  std::ifstream in = OpenIn(a.trace.trace);
  mpu::TraceReader reader(in, MakeSlotConfig(a.trace), MakeParseOptions(a.trace));
  const uint64_t epoch = reader.slot_config().epoch_len;
  if (epoch == mpu::kUnboundedEpoch) {
    throw UsageError("epoch length unknown: pass --epoch or add epoch= to the "
                     "trace header");
  }
  mpu::PlanInput input;
  input.epsilon = a.epsilon;
  input.delta = a.delta;
  input.epoch_len = epoch;
  input.p = a.p;
  input.flow_count = a.flows != 0 ? a.flows : CountKeys(a, adapter);
  const mpu::Plan plan = mpu::MakePlan(input, a.memory_cap);
  std::cerr << "# plan s=" << plan.s << " w=" << plan.w << " m=" << plan.m
            << " copies=" << plan.copies << " p=" << plan.p
            << " epoch=" << plan.epoch_len << " flows=" << input.flow_count
            << " memory_bytes=" << plan.memory_bytes() << '\n';

  mpu::MpuEnsemble ensemble(plan, mpu::HashSeed{a.seed}, a.memory_cap);
  const mpu::IngestReport report = mpu::StreamInto(reader, ensemble, adapter);
  Output out(a.out, true);
  ensemble.Save(out.get());
  out.Close();

  nlohmann::json j = report.ToJson();
  j["plan"] = {{"s", plan.s},           {"w", plan.w},
               {"m", plan.m},           {"copies", plan.copies},
               {"p", plan.p},           {"epoch_len", plan.epoch_len},
               {"flow_count", input.flow_count},
               {"memory_bytes", plan.memory_bytes()}};
  j["seed"] = a.seed;
  j["mode"] = a.mode;
  j["simd"] = mpu::kernels::SimdLevelName(mpu::kernels::ActiveSimdLevel());
  std::cout << (a.json ? j.dump(2) : j.dump()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- query

struct QueryArgs {
  std::string ensemble;
  std::vector<std::string> pairs;
  std::optional<int64_t> tau;
  std::string groups;
  bool related = false;
  std::string rule = "literal";
  uint64_t memory_cap = mpu::kDefaultPlanMemoryCap;
  bool json = false;
};

void CheckAdapterFlags(const std::optional<int64_t>& tau,
                       const std::string& groups, bool related) {
  const int n = (tau ? 1 : 0) + (groups.empty() ? 0 : 1) + (related ? 1 : 0);
  if (n > 1) {
    throw UsageError("--tau, --groups and --related are mutually exclusive");
  }
  if (tau && *tau < 0) throw UsageError("--tau must be >= 0");
}

mpu::AgreementRule ParseRule(const std::string& s) {
  if (s == "literal") return mpu::AgreementRule::kLiteral;
  if (s == "strict") return mpu::AgreementRule::kStrict;
  throw UsageError("unknown rule '" + s + "'");
}

int RunQuery(const QueryArgs& a) {
  CheckAdapterFlags(a.tau, a.groups, a.related);
  if (a.pairs.empty()) throw UsageError("query needs at least one --pair");
  const mpu::AgreementRule rule = ParseRule(a.rule);
  const std::optional<mpu::GroupMap> groups = LoadGroups(a.groups);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : a.pairs) pairs.push_back(ParsePair(p));

  std::ifstream in = OpenIn(a.ensemble, true);
  const mpu::MpuEnsemble e = mpu::MpuEnsemble::Load(in, a.memory_cap);

  nlohmann::json rows = nlohmann::json::array();
  if (!a.json) {
    std::cout << "key_i\tkey_j\testimate\testimate_decimal\tcopy_min\t"
                 "copy_median\tcopy_max\ta_sum\tb_sum\tc_sum\n";
  }
  for (const auto& [ni, nj] : pairs) {
    uint64_t ki = mpu::DigestKey(ni);
    uint64_t kj = mpu::DigestKey(nj);
    if (groups) {
      ki = groups->Resolve(ki);
      kj = groups->Resolve(kj);
    }
    if (a.tau) kj = mpu::VirtualKeyFor(kj, *a.tau);
    const auto all = e.EstimateAll(ki, kj, rule);
    std::vector<mpu::Rational> ests;
    u128 asum = 0, bsum = 0, csum = 0;
    for (const auto& b : all) {
      ests.push_back(b.estimate);
      asum += b.a;
      bsum += b.b;
      csum += b.c;
    }
    std::vector<mpu::Rational> sorted = ests;
    std::sort(sorted.begin(), sorted.end());
    const mpu::Rational med = mpu::MedianOf(ests);
    const std::string label_j = a.tau ? nj + "@tau=" + std::to_string(*a.tau) : nj;
    if (a.json) {
      rows.push_back({{"key_i", ni},
                      {"key_j", label_j},
                      {"estimate", med.ToFractionString()},
                      {"estimate_decimal", med.ToDecimalString()},
                      {"copy_min", sorted.front().ToDecimalString()},
                      {"copy_median", med.ToDecimalString()},
                      {"copy_max", sorted.back().ToDecimalString()},
                      {"a_sum", mpu::U128ToString(asum)},
                      {"b_sum", mpu::U128ToString(bsum)},
                      {"c_sum", mpu::U128ToString(csum)}});
    } else {
      std::cout << ni << '\t' << label_j << '\t' << med.ToFractionString()
                << '\t' << med.ToDecimalString() << '\t'
                << sorted.front().ToDecimalString() << '\t'
                << med.ToDecimalString() << '\t'
                << sorted.back().ToDecimalString() << '\t'
                << mpu::U128ToString(asum) << '\t' << mpu::U128ToString(bsum)
                << '\t' << mpu::U128ToString(csum) << '\n';
    }
  }
  if (a.json) std::cout << rows.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  TraceArgs trace;
  std::vector<std::string> pairs;
  std::optional<int64_t> tau;
  std::string groups;
  bool related = false;
  bool json = false;
};

int RunOracle(const OracleArgs& a) {
  CheckAdapterFlags(a.tau, a.groups, a.related);
  if (a.pairs.empty()) throw UsageError("oracle needs at least one --pair");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : a.pairs) pairs.push_back(ParsePair(p));
  const std::optional<mpu::GroupMap> groups = LoadGroups(a.groups);
  mpu::AdapterConfig adapter;
  if (groups) {
    adapter.mode = mpu::AdapterMode::kGroup;
    adapter.groups = &*groups;
  } else if (a.related) {
    adapter.mode = mpu::AdapterMode::kRelated;
  }

  std::ifstream in = OpenIn(a.trace.trace);
  mpu::TraceReader reader(in, MakeSlotConfig(a.trace), MakeParseOptions(a.trace));
  mpu::ExactTracker tracker(reader.slot_config().epoch_len);
  mpu::StreamInto(reader, tracker, adapter);

  const char* kind = a.tau ? "cor_tau" : groups ? "gcor" : a.related ? "tuple_cor"
                                                                      : "cor";
  nlohmann::json rows = nlohmann::json::array();
  if (!a.json) std::cout << "key_i\tkey_j\tkind\tvalue\n";
  for (const auto& [ni, nj] : pairs) {
    uint64_t ki = mpu::DigestKey(ni);
    uint64_t kj = mpu::DigestKey(nj);
    if (groups) {
      ki = groups->Resolve(ki);
      kj = groups->Resolve(kj);
    }
    const uint64_t v = a.tau ? tracker.CorTau(ki, kj, *a.tau) : tracker.Cor(ki, kj);
    if (a.json) {
      rows.push_back({{"key_i", ni}, {"key_j", nj}, {"kind", kind}, {"value", v}});
    } else {
      std::cout << ni << '\t' << nj << '\t' << kind << '\t' << v << '\n';
    }
  }
  if (a.json) std::cout << rows.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string scenario = "all";
  std::optional<uint64_t> trials;
  double epsilon = 0.2;
  double delta = 0.1;
  uint64_t epoch = 2000;
  uint64_t flows = 100;
  uint64_t p = 3;
  std::vector<uint64_t> cors = {50, 300, 1000};
  double q = 0.05;
  uint64_t seed = 1;
  uint64_t events = 10'000'000;
  std::string out;
  bool json = false;
};

int RunBench(const BenchArgs& a) {
  static const std::vector<std::string> kScenarios = {
      "accuracy", "variance", "collision", "discretization", "adapters",
      "throughput"};
  const bool all = a.scenario == "all";
  if (!all && std::find(kScenarios.begin(), kScenarios.end(), a.scenario) ==
                  kScenarios.end()) {
    throw UsageError("unknown scenario '" + a.scenario + "'");
  }
  if (a.trials) mpu::bench::CheckTrials(*a.trials);
  PrintSeed("bench", a.seed);

  namespace b = mpu::bench;
  b::BenchReport report;
  for (size_t i = 0; i < kScenarios.size(); ++i) {
    const std::string& name = kScenarios[i];
    if (!all && name != a.scenario) continue;
    const uint64_t seed = mpu::DeriveSeed(a.seed, i);
    if (name == "accuracy") {
      b::AccuracyScenario sc;
      sc.plan = {a.epsilon, a.delta, a.epoch, a.flows, a.p};
      sc.planted_cors = a.cors;
      sc.q = a.q;
      sc.seed = seed;
      if (a.trials) sc.trials = *a.trials;
      report.Append(b::RunAccuracy(sc));
    } else if (name == "variance") {
      b::VarianceScenario sc;
      sc.seed = seed;
      if (a.trials) sc.trials = *a.trials;
      report.Append(b::RunVariance(sc));
    } else if (name == "collision") {
      b::CollisionScenario sc;
      sc.seed = seed;
      if (a.trials) sc.trials = *a.trials;
      report.Append(b::RunCollision(sc));
    } else if (name == "discretization") {
      b::DiscretizationScenario sc;
      sc.seed = seed;
      if (a.trials) sc.trials = *a.trials;
      report.Append(b::RunDiscretization(sc));
    } else if (name == "adapters") {
      b::AdapterScenario sc = b::AdapterScenario::Default();
      sc.seed = seed;
      if (a.trials) sc.trials = *a.trials;
      report.Append(b::RunAdapters(sc));
    } else {
      b::ThroughputScenario sc;
      sc.seed = seed;
      sc.events = a.events;
      report.Append(b::RunThroughput(sc));
    }
  }
  if (!a.out.empty()) {
    Output out(a.out);
    report.WriteTsv(out.get());
    out.Close();
  }
  if (a.json) {
    std::cout << report.ToJson().dump(2) << '\n';
  } else if (a.out.empty()) {
    report.WriteTsv(std::cout);
  }
  return report.all_pass() ? kExitOk : kExitBenchFail;
}

void AddTraceFlags(CLI::App* cmd, TraceArgs& t) {
  cmd->add_option("--trace", t.trace, "Trace file")->required();
  cmd->add_option("--epoch", t.epoch,
                  "Epoch length in slots (default: trace header)");
  cmd->add_option("--slot-width", t.slot_width, "Timestamp units per slot");
  cmd->add_option("--epoch-start", t.epoch_start, "Timestamp of slot 0");
  cmd->add_option("--max-error-rate", t.max_error_rate,
                  "Abort when malformed lines exceed this fraction");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPU sketch: multiplexed flow-correlation tracking"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* cs = app.add_subcommand("synth", "Generate a synthetic trace");
  cs->add_option("--flows", synth.flows, "Background flows");
  cs->add_option("--epoch", synth.epoch, "Epoch length in slots");
  cs->add_option("--pair", synth.pairs, "Planted pair i:j:N (repeatable)");
  cs->add_option("--q", synth.q, "Background activity probability");
  cs->add_option("--seed", synth.seed, "Seed");
  cs->add_option("--out", synth.out, "Trace output (default stdout)");
  cs->add_option("--truth", synth.truth, "Truth table output");

  TrackArgs track;
  auto* ct = app.add_subcommand("track", "Build an ensemble from a trace");
  AddTraceFlags(ct, track.trace);
  ct->add_option("--epsilon", track.epsilon, "Accuracy target");
  ct->add_option("--delta", track.delta, "Failure probability");
  ct->add_option("--p", track.p, "Blocks per sketch");
  ct->add_option("--seed", track.seed, "Master seed");
  ct->add_option("--flows", track.flows, "Flow count (default: first pass)");
  ct->add_option("--mode", track.mode, "flow|group|related|lagged");
  ct->add_option("--tau", track.tau, "Lag bound for --mode lagged");
  ct->add_option("--groups", track.groups, "NDJSON flow->group map");
  ct->add_option("--memory-cap", track.memory_cap, "Counter memory cap, bytes");
  ct->add_option("--out", track.out, "Ensemble output file");
  ct->add_flag("--json", track.json, "Pretty-print the report");

  QueryArgs query;
  int64_t query_tau = 0;
  auto* cq = app.add_subcommand("query", "Estimate correlations");
  cq->add_option("--ensemble", query.ensemble, "Ensemble file")->required();
  cq->add_option("--pair", query.pairs, "Pair a:b (repeatable)");
  auto* qtau = cq->add_option("--tau", query_tau, "Lagged query bound");
  cq->add_option("--groups", query.groups, "Resolve names via NDJSON map");
  cq->add_flag("--related", query.related, "Pairs name related services");
  cq->add_option("--rule", query.rule, "literal|strict");
  cq->add_option("--memory-cap", query.memory_cap, "Load memory cap, bytes");
  cq->add_flag("--json", query.json, "JSON output");

  OracleArgs oracle;
  int64_t oracle_tau = 0;
  auto* co = app.add_subcommand("oracle", "Exact correlations");
  AddTraceFlags(co, oracle.trace);
  co->add_option("--pair", oracle.pairs, "Pair a:b (repeatable)");
  auto* otau = co->add_option("--tau", oracle_tau, "Lag bound");
  co->add_option("--groups", oracle.groups, "NDJSON flow->group map");
  co->add_flag("--related", oracle.related, "Tuple (src, slot) correlation");
  co->add_flag("--json", oracle.json, "JSON output");

  BenchArgs bench;
  uint64_t bench_trials = 0;
  auto* cb = app.add_subcommand("bench", "Monte-Carlo bound checks");
  cb->add_option("--scenario", bench.scenario,
                 "all|accuracy|variance|collision|discretization|adapters|"
                 "throughput");
  auto* btrials = cb->add_option("--trials", bench_trials, "Trials per cell");
  cb->add_option("--epsilon", bench.epsilon, "Accuracy: epsilon");
  cb->add_option("--delta", bench.delta, "Accuracy: delta");
  cb->add_option("--epoch", bench.epoch, "Accuracy: epoch length");
  cb->add_option("--flows", bench.flows, "Accuracy: flow count");
  cb->add_option("--p", bench.p, "Accuracy: blocks");
  cb->add_option("--cor", bench.cors, "Accuracy: planted correlations");
  cb->add_option("--q", bench.q, "Accuracy: background activity");
  cb->add_option("--seed", bench.seed, "Master seed");
  cb->add_option("--events", bench.events, "Throughput: events");
  cb->add_option("--out", bench.out, "TSV report file");
  cb->add_flag("--json", bench.json, "JSON report on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*cs) return RunSynth(synth);
    if (*ct) return RunTrack(track);
    if (*cq) {
      if (qtau->count() > 0) query.tau = query_tau;
      return RunQuery(query);
    }
    if (*co) {
      if (otau->count() > 0) oracle.tau = oracle_tau;
      return RunOracle(oracle);
    }
    if (*cb) {
      if (btrials->count() > 0) bench.trials = bench_trials;
      return RunBench(bench);
    }
  } catch (const mpu::IngestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const mpu::MemoryCapExceeded& e) {
    std::cerr << "error: " << e.what() << " (" << e.bytes() << " bytes)\n";
    return kExitInput;
  } catch (const mpu::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
