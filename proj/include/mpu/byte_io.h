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

// Little-endian encoding helpers for the binary file formats.

#ifndef MPU_BYTE_IO_H_
#define MPU_BYTE_IO_H_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "mpu/errors.h"

namespace mpu {

class ByteWriter {
 public:
  template <class T>
    requires std::is_unsigned_v<T>
  void Put(T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
  }
  void PutBytes(std::span<const uint8_t> raw) {
    bytes_.insert(bytes_.end(), raw.begin(), raw.end());
  }

  const std::vector<uint8_t>& bytes() const { return bytes_; }
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

// Cursor over an in-memory buffer; throws FormatError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  template <class T>
    requires std::is_unsigned_v<T>
  T Get() {
    Require(sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return v;
  }

  size_t position() const { return pos_; }

 private:
  void Require(size_t n) const {
    if (data_.size() - pos_ < n) throw FormatError("truncated input");
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Reads exactly n bytes from `in`, appending to `out`.
inline void ReadExactly(std::istream& in, size_t n, std::vector<uint8_t>& out) {
  const size_t old = out.size();
  out.resize(old + n);
  in.read(reinterpret_cast<char*>(out.data() + old),
          static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n) {
    throw FormatError("truncated input: wanted " + std::to_string(n) +
                      " bytes, got " + std::to_string(in.gcount()));
  }
}

}  // namespace mpu

#endif  // MPU_BYTE_IO_H_
