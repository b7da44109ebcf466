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

#ifndef MPU_RATIONAL_H_
#define MPU_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>

namespace mpu {

using u128 = unsigned __int128;

std::string U128ToString(u128 v);

// Nonnegative exact fraction. Ordering is exact for any representable values
// (continued-fraction comparison, no cross-multiplication overflow).
struct Rational {
  u128 num = 0;
  u128 den = 1;

  static Rational Zero() { return {0, 1}; }

  double ToDouble() const;
  Rational Reduced() const;
  // "num/den" in lowest terms.
  std::string ToFractionString() const;
  // Fixed-point rendering rounded half-up, e.g. "400.250000".
  std::string ToDecimalString(int places = 6) const;

  friend std::strong_ordering operator<=>(const Rational& x, const Rational& y);
  friend bool operator==(const Rational& x, const Rational& y) {
    return (x <=> y) == std::strong_ordering::equal;
  }
};

}  // namespace mpu

#endif  // MPU_RATIONAL_H_
