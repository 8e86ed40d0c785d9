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

#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gksum {

// The clock counts whole chunks of stream weight. One time step passes for
// every `ell` units of weight, where ell = 1/epsilon.

/// Time step after `total_weight` units of stream weight have arrived.
inline std::uint64_t current_time(std::uint64_t total_weight, std::uint64_t ell) {
  return total_weight / ell;
}

/// Insertion time step of an update arriving when `weight_before` units of
/// weight have already been seen.
inline std::uint64_t insertion_time(std::uint64_t weight_before, std::uint64_t ell) {
  return (weight_before + 1) / ell;
}

/// Band value of an element inserted at time step `t0`, observed at time
/// step `t`. The band is 0 in the insertion step; every later step that is a
/// multiple of 2^band promotes the band by one. Elements of equal age class
/// stay grouped together as time advances.
///
/// Computed in O(1): with d = t - t0, the band is `alpha` exactly when
///   2^(alpha-1) + (t mod 2^(alpha-1)) <= d < 2^alpha + (t mod 2^alpha),
/// and these intervals confine alpha to floor(log2 d) or floor(log2 d) + 1.
inline std::uint32_t band_value(std::uint64_t t0, std::uint64_t t) {
  if (t0 > t) throw std::invalid_argument("band_value: t0 exceeds t");
  if (t0 == t) return 0;
  const std::uint64_t d = t - t0;
  const auto in_interval = [&](std::uint32_t alpha) {
    const unsigned __int128 one = 1;
    const std::uint64_t lo_mod = (alpha - 1 >= 64) ? t : (t & ((std::uint64_t{1} << (alpha - 1)) - 1));
    const std::uint64_t hi_mod = (alpha >= 64) ? t : (t & ((std::uint64_t{1} << alpha) - 1));
    const unsigned __int128 lo = (one << (alpha - 1)) + lo_mod;
    const unsigned __int128 hi = (one << alpha) + hi_mod;
    return lo <= d && d < hi;
  };
  const std::uint32_t k = 63 - static_cast<std::uint32_t>(std::countl_zero(d));
  if (in_interval(k + 1)) return k + 1;
  assert(in_interval(k));
  return k;
}

/// Reference implementation of band_value that replays the promotion rule
/// step by step from t0 to t. O(t - t0); used to cross-check the closed form.
inline std::uint32_t band_value_iterative(std::uint64_t t0, std::uint64_t t) {
  if (t0 > t) throw std::invalid_argument("band_value_iterative: t0 exceeds t");
  std::uint32_t v = 0;
  for (std::uint64_t step = t0 + 1; step <= t; ++step) {
    const std::uint64_t mask = (v >= 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << v) - 1);
    if ((step & mask) == 0) ++v;
  }
  return v;
}

/// Upper bound on any band value attainable at time step `t`; used to size
/// per-band partitions in diagnostics.
inline std::uint32_t max_band(std::uint64_t t) {
  if (t == 0) return 0;
  if (t > ~std::uint64_t{0} - 2) t = ~std::uint64_t{0} - 2;
  // largest B with 2^(B-1) - 2 <= t
  return static_cast<std::uint32_t>(63 - std::countl_zero(t + 2)) + 1;
}

/// Smallest integer >= log2(t). Exact for all t >= 1.
inline std::uint64_t ceil_log2(std::uint64_t t) {
  if (t <= 1) return 0;
  return static_cast<std::uint64_t>(std::bit_width(t - 1));
}

/// Smallest integer >= (log2 t)^2. Exact when t is a power of two; the
/// remaining cases square an irrational value, so rounding never sits on an
/// integer boundary.
inline std::uint64_t ceil_log2_squared(std::uint64_t t) {
  if (t <= 1) return 0;
  if (std::has_single_bit(t)) {
    const std::uint64_t k = static_cast<std::uint64_t>(std::bit_width(t)) - 1;
    return k * k;
  }
  const long double x = std::log2(static_cast<long double>(t));
  return static_cast<std::uint64_t>(std::ceil(x * x));
}

/// Smallest integer >= mult * log2(t), with the same exactness notes as
/// ceil_log2_squared.
inline std::uint64_t ceil_mul_log2(std::uint64_t mult, std::uint64_t t) {
  if (t <= 1 || mult == 0) return 0;
  if (std::has_single_bit(t)) {
    return mult * (static_cast<std::uint64_t>(std::bit_width(t)) - 1);
  }
  const long double x = static_cast<long double>(mult) * std::log2(static_cast<long double>(t));
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace gksum
