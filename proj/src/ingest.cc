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

#include "mpu/ingest.h"

#include <charconv>
#include <chrono>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "mpu/errors.h"
#include "mpu/hashing.h"
#include "mpu/rng.h"

namespace mpu {
namespace {

constexpr std::string_view kHeaderPrefix = "#mpu-trace";

template <class Int>
bool ParseInt(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool IsValidId(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (static_cast<unsigned char>(ch) < 0x20 || ch == 0x7f) return false;
  }
  return true;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

using Clock = std::chrono::steady_clock;

void Finish(IngestReport& report, const TraceReader& reader,
            Clock::time_point start) {
  report.lines = reader.lines();
  report.events = reader.events();
  report.skipped_out_of_epoch = reader.skipped_out_of_epoch();
  report.errors = reader.errors();
  report.wall_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  report.events_per_sec = report.wall_seconds > 0
                              ? static_cast<double>(report.events) /
                                    report.wall_seconds
                              : 0.0;
}

}  // namespace

TraceHeader ParseTraceHeader(const std::string& raw) {
  std::string_view line(raw);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::istringstream tokens{std::string(line)};
  std::string tok;
  tokens >> tok;
  if (tok != kHeaderPrefix) {
    throw FormatError("trace: missing '#mpu-trace' header line");
  }
  tokens >> tok;
  if (tok != "v1") throw FormatError("trace: unsupported version '" + tok + "'");
  TraceHeader h;
  bool have_mode = false;
  while (tokens >> tok) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos) {
      throw FormatError("trace: bad header token '" + tok + "'");
    }
    const std::string key = tok.substr(0, eq);
    const std::string value = tok.substr(eq + 1);
    if (key == "mode") {
      if (value == "slot") {
        h.mode = TraceMode::kSlot;
      } else if (value == "ts") {
        h.mode = TraceMode::kTimestamp;
      } else {
        throw FormatError("trace: unknown mode '" + value + "'");
      }
      have_mode = true;
    } else if (key == "epoch") {
      uint64_t n = 0;
      if (!ParseInt(value, n) || n == 0) {
        throw FormatError("trace: bad epoch '" + value + "'");
      }
      h.epoch_len = n;
    } else {
      throw FormatError("trace: unknown header key '" + key + "'");
    }
  }
  if (!have_mode) throw FormatError("trace: header lacks mode=slot|ts");
  return h;
}

void SlotConfig::Validate() const {
  if (slot_width == 0) throw InvalidArgument("slot width must be >= 1");
  if (epoch_len == 0) throw InvalidArgument("epoch length must be >= 1");
}

std::optional<uint64_t> SlotConfig::SlotOfTimestamp(int64_t ts) const {
  if (ts < epoch_start) return std::nullopt;
  const uint64_t offset =
      static_cast<uint64_t>(ts) - static_cast<uint64_t>(epoch_start);
  const uint64_t slot = offset / slot_width;
  if (slot >= epoch_len) return std::nullopt;
  return slot;
}

TraceReader::TraceReader(std::istream& in, const SlotConfig& cfg,
                         const ParseOptions& options)
    : in_(in), cfg_(cfg), options_(options) {
  cfg_.Validate();
  if (!std::getline(in_, line_)) {
    throw FormatError("trace: empty input, expected a header line");
  }
  header_ = ParseTraceHeader(line_);
  if (cfg_.epoch_len == kUnboundedEpoch && header_.epoch_len) {
    cfg_.epoch_len = *header_.epoch_len;
  }
}

void TraceReader::Tally(const std::string& what) {
  ++errors_;
  if (samples_.size() < options_.max_error_samples) {
    samples_.emplace_back(line_no_, what);
  }
}

std::optional<ParsedEvent> TraceReader::Next() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    std::string_view line(line_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    ++lines_;
    const std::vector<std::string_view> f = SplitCommas(line);
    if (f.size() < 2 || f.size() > 4) {
      Tally("expected 2 to 4 comma-separated fields");
      continue;
    }
    ParsedEvent ev;
    ev.line = line_no_;
    if (header_.mode == TraceMode::kSlot) {
      uint64_t slot = 0;
      if (!ParseInt(f[0], slot)) {
        Tally("bad slot");
        continue;
      }
      if (slot >= cfg_.epoch_len) {
        ++skipped_;
        continue;
      }
      ev.slot = slot;
    } else {
      int64_t ts = 0;
      if (!ParseInt(f[0], ts)) {
        Tally("bad timestamp");
        continue;
      }
      const auto slot = cfg_.SlotOfTimestamp(ts);
      if (!slot) {
        ++skipped_;
        continue;
      }
      ev.slot = *slot;
    }
    if (!IsValidId(f[1])) {
      Tally("bad flow id");
      continue;
    }
    ev.flow = DigestKey(f[1]);
    bool ok = true;
    if (f.size() >= 3 && !f[2].empty()) {
      if (IsValidId(f[2])) {
        ev.group = DigestKey(f[2]);
      } else {
        ok = false;
      }
    }
    if (f.size() == 4 && !f[3].empty()) {
      if (IsValidId(f[3])) {
        ev.src = DigestKey(f[3]);
      } else {
        ok = false;
      }
    }
    if (!ok) {
      Tally("bad group or source id");
      continue;
    }
    ++events_;
    return ev;
  }
  return std::nullopt;
}

void TraceReader::CheckErrorRate() const {
  if (lines_ == 0 || errors_ == 0) return;
  const double rate = static_cast<double>(errors_) / static_cast<double>(lines_);
  if (rate > options_.max_error_rate) {
    std::string msg = "trace: " + std::to_string(errors_) + " malformed of " +
                      std::to_string(lines_) + " lines exceeds error-rate limit";
    if (!samples_.empty()) {
      msg += " (first at line " + std::to_string(samples_.front().first) +
             ": " + samples_.front().second + ")";
    }
    throw FormatError(msg);
  }
}

void SynthSpec::Validate() const {
  if (epoch_len == 0) throw InvalidArgument("synth: epoch must be >= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("synth: q must lie in [0, 1]");
  for (const PlantedPair& p : pairs) {
    if (p.shared > epoch_len) {
      throw InvalidArgument("synth: planted pair " + p.flow_i + ":" + p.flow_j +
                            " shares " + std::to_string(p.shared) +
                            " slots but the epoch has only " +
                            std::to_string(epoch_len));
    }
    if (!IsValidId(p.flow_i) || !IsValidId(p.flow_j) ||
        p.flow_i.find(',') != std::string::npos ||
        p.flow_j.find(',') != std::string::npos) {
      throw InvalidArgument("synth: planted flow ids must be printable text");
    }
  }
  if (flow_count + 2 * pairs.size() > 0xffffffffULL) {
    throw InvalidArgument("synth: too many flows");
  }
}

SynthTrace GenerateTrace(const SynthSpec& spec) {
  spec.Validate();
  SynthTrace out;
  out.epoch_len = spec.epoch_len;
  std::unordered_map<std::string, uint32_t> index;
  auto add_flow = [&](const std::string& id) {
    const auto [it, inserted] =
        index.emplace(id, static_cast<uint32_t>(out.flow_ids.size()));
    if (inserted) out.flow_ids.push_back(id);
    return it->second;
  };
  for (uint64_t f = 0; f < spec.flow_count; ++f) {
    add_flow("f" + std::to_string(f));
  }
  std::vector<std::pair<uint32_t, uint32_t>> pair_idx;
  for (const PlantedPair& p : spec.pairs) {
    const uint32_t i = add_flow(p.flow_i);
    const uint32_t j = add_flow(p.flow_j);
    pair_idx.emplace_back(i, j);
  }
  for (const std::string& id : out.flow_ids) {
    out.flow_keys.push_back(DigestKey(id));
  }

  const uint64_t T = spec.epoch_len;
  std::vector<std::vector<uint8_t>> active(out.flow_ids.size(),
                                           std::vector<uint8_t>(T, 0));
  SplitMix64 rng(spec.seed);
  std::vector<uint64_t> perm(T);
  for (size_t k = 0; k < spec.pairs.size(); ++k) {
    std::iota(perm.begin(), perm.end(), uint64_t{0});
    const auto [i, j] = pair_idx[k];
    for (uint64_t n = 0; n < spec.pairs[k].shared; ++n) {
      const uint64_t pick = n + rng.Below(T - n);
      std::swap(perm[n], perm[pick]);
      active[i][perm[n]] = 1;
      active[j][perm[n]] = 1;
    }
  }
  if (spec.q > 0.0) {
    const size_t background =
        spec.background_on_planted ? active.size() : spec.flow_count;
    for (size_t f = 0; f < background; ++f) {
      for (uint64_t t = 0; t < T; ++t) {
        if (rng.Bernoulli(spec.q)) active[f][t] = 1;
      }
    }
  }
  for (uint64_t t = 0; t < T; ++t) {
    for (uint32_t f = 0; f < active.size(); ++f) {
      if (active[f][t]) out.events.push_back({t, f});
    }
  }
  return out;
}

std::vector<TruthRow> ComputeTruth(const SynthSpec& spec,
                                   const SynthTrace& trace) {
  ExactTracker tracker(trace.epoch_len);
  for (const SynthEvent& e : trace.events) {
    tracker.Record(trace.flow_keys[e.flow], e.slot);
  }
  std::vector<TruthRow> rows;
  for (const PlantedPair& p : spec.pairs) {
    rows.push_back({p.flow_i, p.flow_j, p.shared,
                    tracker.Cor(DigestKey(p.flow_i), DigestKey(p.flow_j))});
  }
  return rows;
}

void WriteTrace(std::ostream& out, const SynthTrace& trace) {
  out << kHeaderPrefix << " v1 mode=slot epoch=" << trace.epoch_len << '\n';
  for (const SynthEvent& e : trace.events) {
    out << e.slot << ',' << trace.flow_ids[e.flow] << '\n';
  }
}

void WriteTruth(std::ostream& out, const std::vector<TruthRow>& truth) {
  out << "flow_i\tflow_j\tplanted\tcor\n";
  for (const TruthRow& r : truth) {
    out << r.flow_i << '\t' << r.flow_j << '\t' << r.planted << '\t' << r.cor
        << '\n';
  }
}

nlohmann::json IngestReport::ToJson() const {
  return {{"lines", lines},
          {"events", events},
          {"updates", updates},
          {"skipped_out_of_epoch", skipped_out_of_epoch},
          {"errors", errors},
          {"wall_seconds", wall_seconds},
          {"events_per_sec", events_per_sec}};
}

IngestReport StreamInto(TraceReader& reader, MpuEnsemble& target,
                        const AdapterConfig& adapter) {
  const auto start = Clock::now();
  IngestReport report;
  const uint64_t epoch = reader.slot_config().epoch_len;
  while (const auto ev = reader.Next()) {
    try {
      if (ev->slot >= epoch) continue;
      switch (adapter.mode) {
        case AdapterMode::kFlow:
          target.Update(ev->flow, ev->slot);
          ++report.updates;
          break;
        case AdapterMode::kGroup: {
          uint64_t group = ev->flow;
          if (ev->group) {
            group = *ev->group;
          } else if (adapter.groups != nullptr) {
            group = adapter.groups->Resolve(ev->flow);
          }
          target.Update(group, ev->slot);
          ++report.updates;
          break;
        }
        case AdapterMode::kRelated:
          if (!ev->src) throw InvalidArgument("related mode needs a src column");
          UpdateRelated(target, ev->flow, *ev->src, ev->slot);
          ++report.updates;
          break;
        case AdapterMode::kLagged: {
          target.Update(ev->flow, ev->slot);
          UpdateLagged(target, LagConfig::For(ev->flow, adapter.tau), ev->slot);
          report.updates +=
              2 + std::min<uint64_t>(ev->slot, static_cast<uint64_t>(adapter.tau));
          break;
        }
      }
    } catch (const Error& e) {
      throw IngestError(e.what(), ev->line);
    }
  }
  Finish(report, reader, start);
  reader.CheckErrorRate();
  return report;
}

IngestReport StreamInto(TraceReader& reader, ExactTracker& target,
                        const AdapterConfig& adapter) {
  const auto start = Clock::now();
  IngestReport report;
  while (const auto ev = reader.Next()) {
    try {
      switch (adapter.mode) {
        case AdapterMode::kFlow:
        case AdapterMode::kLagged:
          target.Record(ev->flow, ev->slot);
          break;
        case AdapterMode::kGroup: {
          uint64_t group = ev->flow;
          if (ev->group) {
            group = *ev->group;
          } else if (adapter.groups != nullptr) {
            group = adapter.groups->Resolve(ev->flow);
          }
          target.Record(group, ev->slot);
          break;
        }
        case AdapterMode::kRelated:
          if (!ev->src) throw InvalidArgument("related mode needs a src column");
          target.RecordType(ev->flow, TupleKey(*ev->src, ev->slot));
          break;
      }
      ++report.updates;
    } catch (const Error& e) {
      throw IngestError(e.what(), ev->line);
    }
  }
  Finish(report, reader, start);
  reader.CheckErrorRate();
  return report;
}

}  // namespace mpu
