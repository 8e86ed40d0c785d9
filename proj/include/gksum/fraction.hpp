// Copyright 2026 The gksum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gksum {

/// Non-negative exact rational. Keeps quantile and error arithmetic in
/// integers end to end; decimal text from the command line is converted to a
/// fraction without ever passing through floating point.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  Fraction() = default;
  Fraction(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
    const std::uint64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  /// ceil(num * x / den), evaluated without overflow.
  std::uint64_t ceil_mul(std::uint64_t x) const {
    const unsigned __int128 p = static_cast<unsigned __int128>(num) * x;
    return static_cast<std::uint64_t>((p + den - 1) / den);
  }

  bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  /// Parses "0.25", ".5", "1", "0.333" into an exact fraction.
  static Fraction parse_decimal(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("Fraction: empty text");
    std::uint64_t n = 0;
    std::uint64_t d = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (char c : text) {
      if (c == '.') {
        if (seen_dot) throw std::invalid_argument("Fraction: bad decimal '" + std::string(text) + "'");
        seen_dot = true;
        continue;
      }
      if (c < '0' || c > '9') {
        throw std::invalid_argument("Fraction: bad decimal '" + std::string(text) + "'");
      }
      if (n > (~std::uint64_t{0} - 9) / 10 || (seen_dot && d > ~std::uint64_t{0} / 10)) {
        throw std::invalid_argument("Fraction: decimal too long '" + std::string(text) + "'");
      }
      n = n * 10 + static_cast<std::uint64_t>(c - '0');
      if (seen_dot) d *= 10;
      seen_digit = true;
    }
    if (!seen_digit) throw std::invalid_argument("Fraction: bad decimal '" + std::string(text) + "'");
    return Fraction(n, d);
  }
};

}  // namespace gksum
