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

#include <cstdlib>
#include <cstring>

#include "mpu/kernels.h"

namespace mpu::kernels {

SimdLevel DetectSimdLevel() {
#if defined(MPU_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return SimdLevel::kAvx2;
#endif
  return SimdLevel::kScalar;
}

SimdLevel ActiveSimdLevel() {
  static const SimdLevel level = [] {
    const char* env = std::getenv("MPU_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) {
      return SimdLevel::kScalar;
    }
    return DetectSimdLevel();
  }();
  return level;
}

const char* SimdLevelName(SimdLevel level) {
  switch (level) {
    case SimdLevel::kAvx2:
      return "avx2";
    case SimdLevel::kScalar:
      break;
  }
  return "scalar";
}

template <class T>
ColumnScan ScanColumns(std::span<const T* const> rows, size_t cols, T sentinel,
                       bool strict) {
#if defined(MPU_HAVE_AVX2)
  if (ActiveSimdLevel() == SimdLevel::kAvx2) {
    return avx2::ScanColumns<T>(rows, cols, sentinel, strict);
  }
#endif
  return scalar::ScanColumns<T>(rows, cols, sentinel, strict);
}

template <class T>
void MinInto(std::span<T> dst, std::span<const T> src) {
#if defined(MPU_HAVE_AVX2)
  if (ActiveSimdLevel() == SimdLevel::kAvx2) {
    avx2::MinInto<T>(dst, src);
    return;
  }
#endif
  scalar::MinInto<T>(dst, src);
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

}  // namespace mpu::kernels
