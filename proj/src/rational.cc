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

#include "mpu/rational.h"

#include <algorithm>

namespace mpu {
namespace {

u128 Gcd(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

std::string U128ToString(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double Rational::ToDouble() const {
  const Rational r = Reduced();
  return static_cast<double>(r.num / r.den) +
         static_cast<double>(r.num % r.den) / static_cast<double>(r.den);
}

Rational Rational::Reduced() const {
  if (num == 0) return Zero();
  const u128 g = Gcd(num, den);
  return {num / g, den / g};
}

std::string Rational::ToFractionString() const {
  const Rational r = Reduced();
  return U128ToString(r.num) + "/" + U128ToString(r.den);
}

std::string Rational::ToDecimalString(int places) const {
  const Rational r = Reduced();
  u128 whole = r.num / r.den;
  u128 rem = r.num % r.den;
  std::string digits;
  for (int i = 0; i < places; ++i) {
    rem *= 10;
    digits.push_back(static_cast<char>('0' + static_cast<int>(rem / r.den)));
    rem %= r.den;
  }
  // Half-up on the next digit.
  if (rem * 10 / r.den >= 5) {
    int i = places - 1;
    for (; i >= 0; --i) {
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        break;
      }
    }
    if (i < 0) ++whole;
  }
  std::string out = U128ToString(whole);
  if (places > 0) out += "." + digits;
  return out;
}

std::strong_ordering operator<=>(const Rational& x, const Rational& y) {
  // Compare x.num/x.den against y.num/y.den by their continued fractions.
  u128 n1 = x.num, d1 = x.den, n2 = y.num, d2 = y.den;
  bool flipped = false;
  while (true) {
    const u128 q1 = n1 / d1, q2 = n2 / d2;
    if (q1 != q2) {
      const auto c = q1 <=> q2;
      return flipped ? (0 <=> c) : c;
    }
    const u128 r1 = n1 % d1, r2 = n2 % d2;
    if (r1 == 0 || r2 == 0) {
      const auto c = r1 == r2 ? std::strong_ordering::equal
                     : r1 == 0 ? std::strong_ordering::less
                               : std::strong_ordering::greater;
      return flipped ? (0 <=> c) : c;
    }
    // r1/d1 < r2/d2  <=>  d1/r1 > d2/r2.
    n1 = d1;
    d1 = r1;
    n2 = d2;
    d2 = r2;
    flipped = !flipped;
  }
}

}  // namespace mpu
