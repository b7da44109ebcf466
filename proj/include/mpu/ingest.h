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

// Trace files, timestamp slotting, the synthetic trace generator and the
// single-pass ingest driver.
//
// Trace format (text, one event per line):
//
//   #mpu-trace v1 mode=slot|ts [epoch=N]
//   <slot_or_ts>,<flow_id>[,<group_id>[,<src_key>]]
//
// Optional columns are positional and may be empty ("12,f1,,10.0.0.7").
// IDs are printable text without commas. In ts mode a timestamp maps to
// slot floor((ts - epoch_start) / slot_width). Events outside the epoch are
// counted and skipped; malformed lines are tallied with their line number
// and only abort the file when the error rate exceeds the configured limit.

#ifndef MPU_INGEST_H_
#define MPU_INGEST_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpu/adapters.h"
#include "mpu/estimator.h"
#include "mpu/oracle.h"

namespace mpu {

enum class TraceMode { kSlot, kTimestamp };

struct TraceHeader {
  TraceMode mode = TraceMode::kSlot;
  std::optional<uint64_t> epoch_len;
};

// Throws FormatError unless `line` is a valid "#mpu-trace v1 ..." header.
TraceHeader ParseTraceHeader(const std::string& line);

struct SlotConfig {
  uint64_t slot_width = 1;
  int64_t epoch_start = 0;
  uint64_t epoch_len = kUnboundedEpoch;

  void Validate() const;
  // nullopt when the timestamp falls before the start or past the epoch.
  std::optional<uint64_t> SlotOfTimestamp(int64_t ts) const;
};

struct ParsedEvent {
  uint64_t line = 0;
  uint64_t slot = 0;
  uint64_t flow = 0;
  std::optional<uint64_t> group;
  std::optional<uint64_t> src;
};

struct ParseOptions {
  double max_error_rate = 0.05;
  size_t max_error_samples = 16;
};

// Pull parser over a trace stream. Reads the header in the constructor.
// When cfg.epoch_len is unbounded the header's epoch (if any) applies.
class TraceReader {
 public:
  TraceReader(std::istream& in, const SlotConfig& cfg,
              const ParseOptions& options = {});

  const TraceHeader& header() const { return header_; }
  const SlotConfig& slot_config() const { return cfg_; }

  // Next valid in-epoch event, or nullopt at end of stream.
  std::optional<ParsedEvent> Next();

  uint64_t lines() const { return lines_; }
  uint64_t events() const { return events_; }
  uint64_t skipped_out_of_epoch() const { return skipped_; }
  uint64_t errors() const { return errors_; }
  const std::vector<std::pair<uint64_t, std::string>>& error_samples() const {
    return samples_;
  }

  // Throws FormatError when errors / data lines exceeds the limit.
  void CheckErrorRate() const;

 private:
  void Tally(const std::string& what);

  std::istream& in_;
  SlotConfig cfg_;
  ParseOptions options_;
  TraceHeader header_;
  std::string line_;
  uint64_t line_no_ = 1;
  uint64_t lines_ = 0;
  uint64_t events_ = 0;
  uint64_t skipped_ = 0;
  uint64_t errors_ = 0;
  std::vector<std::pair<uint64_t, std::string>> samples_;
};

struct PlantedPair {
  std::string flow_i;
  std::string flow_j;
  uint64_t shared = 0;
};

// Background flows are named "f0" .. "f<flow_count-1>"; planted endpoints
// with other names are appended after them.
struct SynthSpec {
  uint64_t flow_count = 0;
  uint64_t epoch_len = 1;
  double q = 0.0;
  std::vector<PlantedPair> pairs;
  uint64_t seed = 0;
  // When false, planted endpoints get no background activity, so their
  // exact correlation equals the planted count.
  bool background_on_planted = true;

  // Throws InvalidArgument on q outside [0, 1], zero epoch, shared > epoch.
  void Validate() const;
};

struct SynthEvent {
  uint64_t slot;
  uint32_t flow;  // index into SynthTrace::flow_ids
};

struct SynthTrace {
  uint64_t epoch_len = 0;
  std::vector<std::string> flow_ids;
  std::vector<uint64_t> flow_keys;  // DigestKey(flow_ids[i])
  std::vector<SynthEvent> events;   // ascending slot, then flow index
};

struct TruthRow {
  std::string flow_i;
  std::string flow_j;
  uint64_t planted = 0;
  uint64_t cor = 0;  // exact, background coincidences included
};

// Deterministic under spec.seed. Planted pairs get `shared` distinct slots
// forced active in both flows; every flow is then active i.i.d. with
// probability q at every other slot.
SynthTrace GenerateTrace(const SynthSpec& spec);
std::vector<TruthRow> ComputeTruth(const SynthSpec& spec,
                                   const SynthTrace& trace);

void WriteTrace(std::ostream& out, const SynthTrace& trace);
void WriteTruth(std::ostream& out, const std::vector<TruthRow>& truth);

enum class AdapterMode { kFlow, kGroup, kRelated, kLagged };

struct AdapterConfig {
  AdapterMode mode = AdapterMode::kFlow;
  // kGroup: events without a group column resolve through this map (if
  // set); a group column always wins.
  const GroupMap* groups = nullptr;
  // kLagged: every flow also feeds its virtual lag key.
  int64_t tau = 0;
};

struct IngestReport {
  uint64_t lines = 0;
  uint64_t events = 0;
  uint64_t updates = 0;
  uint64_t skipped_out_of_epoch = 0;
  uint64_t errors = 0;
  double wall_seconds = 0.0;
  double events_per_sec = 0.0;

  nlohmann::json ToJson() const;
};

// Single pass over `reader`. Target errors are rethrown as IngestError with
// the offending line; the error-rate check runs after the pass.
IngestReport StreamInto(TraceReader& reader, MpuEnsemble& target,
                        const AdapterConfig& adapter = {});
IngestReport StreamInto(TraceReader& reader, ExactTracker& target,
                        const AdapterConfig& adapter = {});

}  // namespace mpu

#endif  // MPU_INGEST_H_
