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

#include <algorithm>

#include "mpu/kernels.h"

namespace mpu::kernels::scalar {

template <class T>
ColumnScan ScanColumns(std::span<const T* const> rows, size_t cols, T sentinel,
                       bool strict) {
  ColumnScan out;
  for (size_t col = 0; col < cols; ++col) {
    T mn = rows[0][col];
    T mx = mn;
    for (size_t r = 1; r < rows.size(); ++r) {
      const T v = rows[r][col];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const bool touched = mn != sentinel;
    if (mn == mx && (!strict || touched)) ++out.agree;
    if (touched) ++out.touched;
    out.min_sum += mn;
  }
  return out;
}

template <class T>
void MinInto(std::span<T> dst, std::span<const T> src) {
  for (size_t i = 0; i < dst.size(); ++i) dst[i] = std::min(dst[i], src[i]);
}

#define MPU_INSTANTIATE(T)                                                  \
  template ColumnScan ScanColumns<T>(std::span<const T* const>, size_t, T, \
                                     bool);                                \
  template void MinInto<T>(std::span<T>, std::span<const T>);

MPU_INSTANTIATE(uint8_t)
MPU_INSTANTIATE(uint16_t)
MPU_INSTANTIATE(uint32_t)
MPU_INSTANTIATE(uint64_t)
#undef MPU_INSTANTIATE

}  // namespace mpu::kernels::scalar
