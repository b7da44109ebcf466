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

// Data-parallel inner loops over counter rows.
//
// Every kernel exists as a portable scalar reference (namespace scalar) and,
// on x86-64 builds, as an AVX2 variant (namespace avx2). The unqualified
// entry points pick a variant once per process from CPUID; setting the
// environment variable MPU_SIMD=scalar forces the reference path.
// Variants must agree bit-for-bit; tests/kernels_test.cc checks this.

#ifndef MPU_KERNELS_H_
#define MPU_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <span>

namespace mpu::kernels {

// Column-wise accumulators over a set of rows of equal length.
//   agree:   columns whose min equals their max (and, when strict, whose min
//            is below the sentinel)
//   touched: columns whose min is below the sentinel
//   min_sum: sum over columns of the column min
struct ColumnScan {
  uint64_t agree = 0;
  uint64_t touched = 0;
  uint64_t min_sum = 0;

  friend bool operator==(const ColumnScan&, const ColumnScan&) = default;
};

enum class SimdLevel { kScalar, kAvx2 };

SimdLevel DetectSimdLevel();
SimdLevel ActiveSimdLevel();
const char* SimdLevelName(SimdLevel level);

// `rows` holds at least one pointer; each row has `cols` counters.
template <class T>
ColumnScan ScanColumns(std::span<const T* const> rows, size_t cols, T sentinel,
                       bool strict);

// dst[i] = min(dst[i], src[i]); sizes must match.
template <class T>
void MinInto(std::span<T> dst, std::span<const T> src);

namespace scalar {
template <class T>
ColumnScan ScanColumns(std::span<const T* const> rows, size_t cols, T sentinel,
                       bool strict);
template <class T>
void MinInto(std::span<T> dst, std::span<const T> src);
}  // namespace scalar

#if defined(MPU_HAVE_AVX2)
namespace avx2 {
template <class T>
ColumnScan ScanColumns(std::span<const T* const> rows, size_t cols, T sentinel,
                       bool strict);
template <class T>
void MinInto(std::span<T> dst, std::span<const T> src);
}  // namespace avx2
#endif

}  // namespace mpu::kernels

#endif  // MPU_KERNELS_H_
