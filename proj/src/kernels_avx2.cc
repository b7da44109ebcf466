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

// AVX2 variants. This translation unit is compiled with -mavx2 and must only
// be entered after a runtime CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <bit>

#include "mpu/kernels.h"

namespace mpu::kernels::avx2 {
namespace {

// Lane operations per counter width. `Mask` returns kBitsPerLane bits per
// lane.
template <class T>
struct Lanes;

template <>
struct Lanes<uint8_t> {
  static constexpr int kBitsPerLane = 1;
  static constexpr size_t kCount = 32;
  static __m256i Min(__m256i a, __m256i b) { return _mm256_min_epu8(a, b); }
  static __m256i Max(__m256i a, __m256i b) { return _mm256_max_epu8(a, b); }
  static __m256i Eq(__m256i a, __m256i b) { return _mm256_cmpeq_epi8(a, b); }
  static __m256i Splat(uint8_t v) {
    return _mm256_set1_epi8(static_cast<char>(v));
  }
  static uint32_t Mask(__m256i m) {
    return static_cast<uint32_t>(_mm256_movemask_epi8(m));
  }
  static __m256i Widen(__m256i v) {
    return _mm256_sad_epu8(v, _mm256_setzero_si256());
  }
};

template <>
struct Lanes<uint16_t> {
  static constexpr size_t kCount = 16;
  static __m256i Min(__m256i a, __m256i b) { return _mm256_min_epu16(a, b); }
  static __m256i Max(__m256i a, __m256i b) { return _mm256_max_epu16(a, b); }
  static __m256i Eq(__m256i a, __m256i b) { return _mm256_cmpeq_epi16(a, b); }
  static __m256i Splat(uint16_t v) {
    return _mm256_set1_epi16(static_cast<short>(v));
  }
  // Two identical mask bits per 16-bit lane.
  static constexpr int kBitsPerLane = 2;
  static uint32_t Mask(__m256i m) {
    return static_cast<uint32_t>(_mm256_movemask_epi8(m));
  }
  static __m256i Widen(__m256i v) {
    const __m256i lo = _mm256_cvtepu16_epi32(_mm256_castsi256_si128(v));
    const __m256i hi = _mm256_cvtepu16_epi32(_mm256_extracti128_si256(v, 1));
    const __m256i s = _mm256_add_epi32(lo, hi);
    return _mm256_add_epi64(
        _mm256_cvtepu32_epi64(_mm256_castsi256_si128(s)),
        _mm256_cvtepu32_epi64(_mm256_extracti128_si256(s, 1)));
  }
};

template <>
struct Lanes<uint32_t> {
  static constexpr int kBitsPerLane = 1;
  static constexpr size_t kCount = 8;
  static __m256i Min(__m256i a, __m256i b) { return _mm256_min_epu32(a, b); }
  static __m256i Max(__m256i a, __m256i b) { return _mm256_max_epu32(a, b); }
  static __m256i Eq(__m256i a, __m256i b) { return _mm256_cmpeq_epi32(a, b); }
  static __m256i Splat(uint32_t v) {
    return _mm256_set1_epi32(static_cast<int>(v));
  }
  static uint32_t Mask(__m256i m) {
    return static_cast<uint32_t>(_mm256_movemask_ps(_mm256_castsi256_ps(m)));
  }
  static __m256i Widen(__m256i v) {
    return _mm256_add_epi64(
        _mm256_cvtepu32_epi64(_mm256_castsi256_si128(v)),
        _mm256_cvtepu32_epi64(_mm256_extracti128_si256(v, 1)));
  }
};

template <>
struct Lanes<uint64_t> {
  static constexpr int kBitsPerLane = 1;
  static constexpr size_t kCount = 4;
  // AVX2 has no unsigned 64-bit min/max; flip the sign bit and use the
  // signed compare.
  static __m256i Greater(__m256i a, __m256i b) {
    const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(1ULL << 63));
    return _mm256_cmpgt_epi64(_mm256_xor_si256(a, bias),
                              _mm256_xor_si256(b, bias));
  }
  static __m256i Min(__m256i a, __m256i b) {
    return _mm256_blendv_epi8(a, b, Greater(a, b));
  }
  static __m256i Max(__m256i a, __m256i b) {
    return _mm256_blendv_epi8(b, a, Greater(a, b));
  }
  static __m256i Eq(__m256i a, __m256i b) { return _mm256_cmpeq_epi64(a, b); }
  static __m256i Splat(uint64_t v) {
    return _mm256_set1_epi64x(static_cast<long long>(v));
  }
  static uint32_t Mask(__m256i m) {
    return static_cast<uint32_t>(_mm256_movemask_pd(_mm256_castsi256_pd(m)));
  }
  static __m256i Widen(__m256i v) { return v; }
};

__m256i Load(const void* p) {
  return _mm256_loadu_si256(static_cast<const __m256i*>(p));
}

uint64_t HorizontalSum64(__m256i v) {
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

}  // namespace

template <class T>
ColumnScan ScanColumns(std::span<const T* const> rows, size_t cols, T sentinel,
                       bool strict) {
  using L = Lanes<T>;
  const __m256i sent = L::Splat(sentinel);
  __m256i sum = _mm256_setzero_si256();
  ColumnScan out;
  size_t col = 0;
  for (; col + L::kCount <= cols; col += L::kCount) {
    __m256i mn = Load(rows[0] + col);
    __m256i mx = mn;
    for (size_t r = 1; r < rows.size(); ++r) {
      const __m256i v = Load(rows[r] + col);
      mn = L::Min(mn, v);
      mx = L::Max(mx, v);
    }
    const uint32_t eq = L::Mask(L::Eq(mn, mx));
    const uint32_t untouched = L::Mask(L::Eq(mn, sent));
    out.agree +=
        std::popcount(strict ? (eq & ~untouched) : eq) / L::kBitsPerLane;
    out.touched += L::kCount - std::popcount(untouched) / L::kBitsPerLane;
    sum = _mm256_add_epi64(sum, L::Widen(mn));
  }
  out.min_sum = HorizontalSum64(sum);
  for (; col < cols; ++col) {
    T mn = rows[0][col];
    T mx = mn;
    for (size_t r = 1; r < rows.size(); ++r) {
      mn = std::min(mn, rows[r][col]);
      mx = std::max(mx, rows[r][col]);
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
  using L = Lanes<T>;
  size_t i = 0;
  for (; i + L::kCount <= dst.size(); i += L::kCount) {
    const __m256i v = L::Min(Load(dst.data() + i), Load(src.data() + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst.data() + i), v);
  }
  for (; i < dst.size(); ++i) dst[i] = std::min(dst[i], src[i]);
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

}  // namespace mpu::kernels::avx2
