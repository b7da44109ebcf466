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

#include "mpu/adapters.h"

#include <array>
#include <string>

#include <nlohmann/json.hpp>

#include "mpu/errors.h"
#include "mpu/hashing.h"

namespace mpu {
namespace {

uint64_t NamespacedDigest(uint8_t ns, uint64_t x, uint64_t y) {
  std::array<uint8_t, 17> buf{};
  buf[0] = ns;
  for (int i = 0; i < 8; ++i) {
    buf[1 + i] = static_cast<uint8_t>(x >> (8 * i));
    buf[9 + i] = static_cast<uint8_t>(y >> (8 * i));
  }
  return DigestKey(std::span<const uint8_t>(buf));
}

}  // namespace

uint64_t VirtualKeyFor(uint64_t flow_key, int64_t tau) {
  if (tau < 0) {
    throw InvalidArgument("lag bound tau must be >= 0, got " +
                          std::to_string(tau));
  }
  return NamespacedDigest(kLagNamespace, flow_key, static_cast<uint64_t>(tau));
}

uint64_t TupleKey(uint64_t src_key, uint64_t slot) {
  return NamespacedDigest(kTupleNamespace, src_key, slot);
}

void GroupMap::Assign(uint64_t flow_key, uint64_t group_key) {
  const auto [it, inserted] = assignment_.emplace(flow_key, group_key);
  if (inserted) {
    order_.emplace_back(flow_key, group_key);
    return;
  }
  if (it->second != group_key) {
    it->second = group_key;
    for (auto& [f, g] : order_) {
      if (f == flow_key) g = group_key;
    }
  }
}

std::optional<uint64_t> GroupMap::Find(uint64_t flow_key) const {
  const auto it = assignment_.find(flow_key);
  if (it == assignment_.end()) return std::nullopt;
  return it->second;
}

uint64_t GroupMap::Resolve(uint64_t flow_key) const {
  if (const auto g = Find(flow_key)) return *g;
  if (strict_) {
    throw InvalidArgument("flow is not assigned to any group (strict mode)");
  }
  return flow_key;
}

std::vector<uint64_t> GroupMap::Members(uint64_t group_key) const {
  std::vector<uint64_t> out;
  for (const auto& [f, g] : order_) {
    if (g == group_key) out.push_back(f);
  }
  return out;
}

GroupMap GroupMap::LoadNdjson(std::istream& in) {
  GroupMap gm;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json obj = nlohmann::json::parse(line);
      const std::string flow = obj.at("flow").get<std::string>();
      const std::string group = obj.at("group").get<std::string>();
      if (flow.empty() || group.empty()) {
        throw FormatError("empty flow or group");
      }
      gm.Assign(DigestKey(flow), DigestKey(group));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("group map line " + std::to_string(line_no) + ": " +
                        e.what());
    } catch (const FormatError& e) {
      throw FormatError("group map line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return gm;
}

LagConfig LagConfig::For(uint64_t flow_key, int64_t tau) {
  return LagConfig{tau, VirtualKeyFor(flow_key, tau)};
}

void UpdateGroup(MpuEnsemble& e, const GroupMap& groups, uint64_t flow_key,
                 uint64_t slot) {
  e.Update(groups.Resolve(flow_key), slot);
}

void UpdateLagged(MpuEnsemble& e, const LagConfig& lag, uint64_t slot) {
  if (lag.tau < 0) throw InvalidArgument("lag bound tau must be >= 0");
  e.copy(0).CheckSlot(slot);
  const uint64_t tau = static_cast<uint64_t>(lag.tau);
  for (uint64_t w = 0; w <= tau && w <= slot; ++w) {
    e.Update(lag.virtual_key, slot - w);
  }
}

void UpdateRelated(MpuEnsemble& e, uint64_t service_key, uint64_t src_key,
                   uint64_t slot) {
  e.UpdateTyped(service_key, TupleKey(src_key, slot));
}

}  // namespace mpu
