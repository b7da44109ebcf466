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

#include "mpu/sketch.h"

#include <algorithm>
#include <array>
#include <ostream>
#include <string>

#include "mpu/byte_io.h"
#include "mpu/errors.h"
#include "mpu/kernels.h"

namespace mpu {
namespace {

constexpr std::array<uint8_t, 4> kMagic = {'M', 'P', 'U', 'S'};
constexpr uint16_t kVersion = 1;
constexpr size_t kHeaderBytes = 4 + 2 + 1 + 1 + 5 * 8;
// Upper bound on 2p row pointers gathered on the stack per estimate.
constexpr uint64_t kMaxBlocks = 64;

template <class T>
std::vector<T> FreshCounters(const MpuParams& params) {
  return std::vector<T>(params.counter_count(), static_cast<T>(params.w + 1));
}

}  // namespace

void MpuParams::Validate() const {
  if (p == 0 || m == 0 || s == 0 || w == 0) {
    throw InvalidArgument("sketch params: p, m, s, w must all be >= 1");
  }
  if (p > kMaxBlocks) {
    throw InvalidArgument("sketch params: p must be <= " +
                          std::to_string(kMaxBlocks));
  }
  if (m > kMersenne61 || s > kMersenne61) {
    throw InvalidArgument("sketch params: m and s must not exceed 2^61 - 1");
  }
  if (w >= kMersenne61) {
    throw InvalidArgument("sketch params: w must be below 2^61 - 1");
  }
  uint64_t cells = 0, col_sum = 0;
  if (__builtin_mul_overflow(p, m, &cells) ||
      __builtin_mul_overflow(cells, s, &cells)) {
    throw InvalidArgument("sketch params: p*m*s overflows");
  }
  // c accumulates s column minima of at most w + 1 each.
  if (__builtin_mul_overflow(s, w + 1, &col_sum)) {
    throw InvalidArgument("sketch params: s*(w+1) overflows 64 bits");
  }
}

int CounterWidthBits(uint64_t w) {
  if (w + 1 <= 0xffu) return 8;
  if (w + 1 <= 0xffffu) return 16;
  if (w + 1 <= 0xffffffffu) return 32;
  return 64;
}

uint64_t CounterBytes(const MpuParams& params) {
  return params.counter_count() * (CounterWidthBits(params.w) / 8);
}

MpuSketch::MpuSketch(const MpuParams& params, HashSeed seed,
                     const SketchOptions& options)
    : params_(params),
      seed_(seed),
      width_bits_(0),
      epoch_len_(options.epoch_len),
      col_hash_(1, 0, 1),
      value_hash_(1, 0, 1) {
  params_.Validate();
  width_bits_ = CounterWidthBits(params_.w);
  const uint64_t bytes = CounterBytes(params_);
  if (bytes > options.memory_cap_bytes) {
    throw MemoryCapExceeded("sketch needs " + std::to_string(bytes) +
                                " bytes of counters, cap is " +
                                std::to_string(options.memory_cap_bytes),
                            bytes);
  }
  row_hashes_.reserve(params_.p);
  for (uint64_t k = 0; k < params_.p; ++k) {
    row_hashes_.push_back(NewPairwise(seed_, k, params_.m));
  }
  col_hash_ = NewPairwise(seed_, params_.p, params_.s);
  value_hash_ = NewPairwise(seed_, params_.p + 1, params_.w);
  switch (width_bits_) {
    case 8:
      counters_ = FreshCounters<uint8_t>(params_);
      break;
    case 16:
      counters_ = FreshCounters<uint16_t>(params_);
      break;
    case 32:
      counters_ = FreshCounters<uint32_t>(params_);
      break;
    default:
      counters_ = FreshCounters<uint64_t>(params_);
      break;
  }
}

uint64_t MpuSketch::counter(size_t block, size_t row, size_t col) const {
  const size_t idx = Index(block, row, col);
  return std::visit([idx](const auto& v) -> uint64_t { return v.at(idx); },
                    counters_);
}

void MpuSketch::CheckSlot(uint64_t slot) const {
  if (slot >= epoch_len_) {
    throw RangeError("slot " + std::to_string(slot) + " outside epoch [0, " +
                     std::to_string(epoch_len_) + ")");
  }
}

void MpuSketch::Update(uint64_t key, uint64_t slot) {
  CheckSlot(slot);
  ApplyItem(key, slot);
}

void MpuSketch::UpdateTyped(uint64_t key, uint64_t type_key) {
  ApplyItem(key, type_key);
}

void MpuSketch::ApplyItem(uint64_t key, uint64_t item) {
  const uint64_t x = Mix64(item);
  const uint64_t col = col_hash_.Bucket(x);
  const uint64_t value = value_hash_.Eval(x);
  std::visit(
      [&](auto& cells) {
        using T = typename std::decay_t<decltype(cells)>::value_type;
        const T v = static_cast<T>(value);
        for (uint64_t k = 0; k < params_.p; ++k) {
          T& cell = cells[Index(k, row_hashes_[k].Bucket(key), col)];
          if (v < cell) cell = v;
        }
      },
      counters_);
}

EstimateBreakdown MpuSketch::Estimate(uint64_t key_i, uint64_t key_j,
                                      AgreementRule rule) const {
  EstimateBreakdown out;
  out.w = params_.w;
  const kernels::ColumnScan scan = std::visit(
      [&](const auto& cells) {
        using T = typename std::decay_t<decltype(cells)>::value_type;
        std::array<const T*, 2 * kMaxBlocks> rows;
        size_t n = 0;
        for (uint64_t k = 0; k < params_.p; ++k) {
          rows[n++] = cells.data() + Index(k, row_hashes_[k].Bucket(key_i), 0);
          rows[n++] = cells.data() + Index(k, row_hashes_[k].Bucket(key_j), 0);
        }
        return kernels::ScanColumns<T>(
            std::span<const T* const>(rows.data(), n), params_.s,
            static_cast<T>(params_.w + 1), rule == AgreementRule::kStrict);
      },
      counters_);
  out.a = scan.agree;
  out.b = scan.touched;
  out.c = scan.min_sum;
  if (out.b == 0 || out.c == 0) {
    out.estimate = Rational::Zero();
  } else {
    out.estimate = Rational{static_cast<u128>(out.w) * out.a * out.b, out.c};
  }
  return out;
}

void MpuSketch::Merge(const MpuSketch& src) {
  if (!(params_ == src.params_) || !(seed_ == src.seed_)) {
    throw IncompatibleSketch(
        "merge requires identical sketch parameters and seed");
  }
  std::visit(
      [&](auto& dst) {
        using V = std::decay_t<decltype(dst)>;
        using T = typename V::value_type;
        const V& other = std::get<V>(src.counters_);
        kernels::MinInto<T>(std::span<T>(dst), std::span<const T>(other));
      },
      counters_);
}

std::vector<uint8_t> MpuSketch::Serialize() const {
  ByteWriter w;
  w.PutBytes(kMagic);
  w.Put<uint16_t>(kVersion);
  w.Put<uint8_t>(static_cast<uint8_t>(width_bits_));
  w.Put<uint8_t>(0);
  w.Put<uint64_t>(params_.p);
  w.Put<uint64_t>(params_.m);
  w.Put<uint64_t>(params_.s);
  w.Put<uint64_t>(params_.w);
  w.Put<uint64_t>(seed_.value);
  auto put_hash = [&w](const PairwiseHash& h) {
    w.Put<uint64_t>(h.a());
    w.Put<uint64_t>(h.b());
  };
  for (const PairwiseHash& h : row_hashes_) put_hash(h);
  put_hash(col_hash_);
  put_hash(value_hash_);
  std::visit(
      [&w](const auto& cells) {
        w.bytes().reserve(w.bytes().size() + cells.size() * sizeof(cells[0]) +
                          8);
        for (const auto c : cells) w.Put(c);
      },
      counters_);
  w.Put<uint64_t>(DigestKey(std::span<const uint8_t>(w.bytes())));
  return std::move(w.bytes());
}

void MpuSketch::Save(std::ostream& out) const {
  const std::vector<uint8_t> bytes = Serialize();
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write sketch");
}

MpuSketch MpuSketch::Load(std::istream& in, const SketchOptions& options) {
  std::vector<uint8_t> buf;
  ReadExactly(in, kHeaderBytes, buf);
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw FormatError("sketch: bad magic");
  }
  ByteReader header(std::span<const uint8_t>(buf).subspan(4));
  const uint16_t version = header.Get<uint16_t>();
  if (version != kVersion) {
    throw FormatError("sketch: unsupported version " + std::to_string(version));
  }
  const int width = header.Get<uint8_t>();
  if (header.Get<uint8_t>() != 0) throw FormatError("sketch: reserved byte");
  MpuParams params;
  params.p = header.Get<uint64_t>();
  params.m = header.Get<uint64_t>();
  params.s = header.Get<uint64_t>();
  params.w = header.Get<uint64_t>();
  const HashSeed seed{header.Get<uint64_t>()};
  try {
    params.Validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("sketch: ") + e.what());
  }
  if (width != CounterWidthBits(params.w)) {
    throw FormatError("sketch: counter width " + std::to_string(width) +
                      " does not match w");
  }
  if (CounterBytes(params) > options.memory_cap_bytes) {
    throw FormatError("sketch: declared size exceeds the memory cap");
  }
  const size_t body = (params.p + 2) * 16 + CounterBytes(params) + 8;
  ReadExactly(in, body, buf);

  const size_t payload = buf.size() - 8;
  ByteReader reader(std::span<const uint8_t>(buf).subspan(kHeaderBytes));
  const uint64_t stored_sum =
      ByteReader(std::span<const uint8_t>(buf).subspan(payload))
          .Get<uint64_t>();
  if (stored_sum !=
      DigestKey(std::span<const uint8_t>(buf.data(), payload))) {
    throw FormatError("sketch: checksum mismatch");
  }

  MpuSketch sk(params, seed, options);
  auto check_hash = [&reader](const PairwiseHash& expect) {
    const uint64_t a = reader.Get<uint64_t>();
    const uint64_t b = reader.Get<uint64_t>();
    if (a != expect.a() || b != expect.b()) {
      throw FormatError("sketch: hash coefficients inconsistent with seed");
    }
  };
  for (const PairwiseHash& h : sk.row_hashes_) check_hash(h);
  check_hash(sk.col_hash_);
  check_hash(sk.value_hash_);
  std::visit(
      [&](auto& cells) {
        using T = typename std::decay_t<decltype(cells)>::value_type;
        for (auto& c : cells) {
          c = reader.Get<T>();
          if (c == 0 || c > params.w + 1) {
            throw FormatError("sketch: counter value outside {1..w+1}");
          }
        }
      },
      sk.counters_);
  return sk;
}

bool operator==(const MpuSketch& x, const MpuSketch& y) {
  return x.params_ == y.params_ && x.seed_ == y.seed_ &&
         x.row_hashes_ == y.row_hashes_ && x.col_hash_ == y.col_hash_ &&
         x.value_hash_ == y.value_hash_ && x.counters_ == y.counters_;
}

}  // namespace mpu
