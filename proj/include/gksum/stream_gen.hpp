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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gksum/summary.hpp"

namespace gksum {

/// One stream update: a value and the number of copies it represents.
struct StreamItem {
  std::int64_t value = 0;
  std::uint64_t weight = 1;

  bool operator==(const StreamItem&) const = default;
};

/// splitmix64. Fixed, documented generator so fixtures reproduce bit-for-bit
/// across implementations and platforms.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw from [0, bound) via the fixed-point multiply reduction.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
};

enum class Order { random, sorted, reverse, sawtooth, duplicate_heavy };
enum class WeightDist { unit, uniform, zipf };

/// Deterministic stream recipe: the same spec always generates the same
/// byte-identical stream.
struct StreamSpec {
  std::uint64_t n = 0;
  Order order = Order::random;
  WeightDist weights = WeightDist::unit;
  std::uint64_t weight_max = 1;  // B for uniform(1..B) and zipf(s, B)
  double zipf_s = 1.0;
  std::uint64_t seed = 0;
};

inline const char* order_name(Order o) {
  switch (o) {
    case Order::random: return "random";
    case Order::sorted: return "sorted";
    case Order::reverse: return "reverse";
    case Order::sawtooth: return "sawtooth";
    case Order::duplicate_heavy: return "dup";
  }
  return "?";
}

inline std::vector<StreamItem> generate(const StreamSpec& spec) {
  if (spec.weights != WeightDist::unit) {
    if (spec.weight_max == 0 || spec.weight_max > 1'000'000) {
      throw std::invalid_argument("generate: weight bound must lie in [1, 10^6]");
    }
    if (spec.weights == WeightDist::zipf && !(spec.zipf_s > 0.0)) {
      throw std::invalid_argument("generate: zipf exponent must be positive");
    }
  }
  SplitMix64 values_rng(spec.seed);
  SplitMix64 weights_rng(spec.seed + 0x5eedull);

  // Inverse-CDF table for zipf(s, B): P(w = k) proportional to 1/k^s.
  std::vector<double> zipf_cdf;
  if (spec.weights == WeightDist::zipf) {
    zipf_cdf.resize(spec.weight_max);
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= spec.weight_max; ++k) {
      acc += std::pow(static_cast<double>(k), -spec.zipf_s);
      zipf_cdf[k - 1] = acc;
    }
    for (double& c : zipf_cdf) c /= acc;
  }

  // duplicate_heavy draws from a small pre-drawn value pool.
  std::vector<std::int64_t> pool;
  if (spec.order == Order::duplicate_heavy) {
    const std::uint64_t distinct = std::max<std::uint64_t>(1, spec.n / 100);
    pool.reserve(distinct);
    for (std::uint64_t i = 0; i < distinct; ++i) {
      pool.push_back(static_cast<std::int64_t>(values_rng.next()));
    }
  }
  const std::uint64_t tooth = std::max<std::uint64_t>(2, spec.n / 16);

  std::vector<StreamItem> out;
  out.reserve(spec.n);
  std::int64_t monotone = 0;
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    StreamItem item;
    switch (spec.order) {
      case Order::random:
        item.value = static_cast<std::int64_t>(values_rng.next());
        break;
      case Order::sorted:
        monotone += 1 + static_cast<std::int64_t>(values_rng.below(4));
        item.value = monotone;
        break;
      case Order::reverse:
        monotone += 1 + static_cast<std::int64_t>(values_rng.below(4));
        item.value = -monotone;
        break;
      case Order::sawtooth:
        item.value = static_cast<std::int64_t>(i % tooth);
        break;
      case Order::duplicate_heavy:
        item.value = pool[values_rng.below(pool.size())];
        break;
    }
    switch (spec.weights) {
      case WeightDist::unit:
        item.weight = 1;
        break;
      case WeightDist::uniform:
        item.weight = 1 + weights_rng.below(spec.weight_max);
        break;
      case WeightDist::zipf: {
        const double u =
            static_cast<double>(weights_rng.next() >> 11) * 0x1.0p-53;  // [0, 1)
        const auto it = std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), u);
        item.weight = static_cast<std::uint64_t>(it - zipf_cdf.begin()) + 1;
        item.weight = std::min(item.weight, spec.weight_max);
        break;
      }
    }
    out.push_back(item);
  }
  return out;
}

/// Serializes a spec as "order:weights:seed:n", the form taken by CLI flags.
inline std::string to_string(const StreamSpec& spec) {
  std::string weights;
  switch (spec.weights) {
    case WeightDist::unit:
      weights = "unit";
      break;
    case WeightDist::uniform:
      weights = "uniform(1.." + std::to_string(spec.weight_max) + ")";
      break;
    case WeightDist::zipf: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "zipf(%g,%llu)", spec.zipf_s,
                    static_cast<unsigned long long>(spec.weight_max));
      weights = buf;
      break;
    }
  }
  return std::string(order_name(spec.order)) + ":" + weights + ":" +
         std::to_string(spec.seed) + ":" + std::to_string(spec.n);
}

namespace detail {

inline std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace detail

inline StreamSpec parse_spec(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 4) {
    throw std::invalid_argument("generator spec must be order:weights:seed:n");
  }
  StreamSpec spec;
  if (parts[0] == "random") spec.order = Order::random;
  else if (parts[0] == "sorted") spec.order = Order::sorted;
  else if (parts[0] == "reverse") spec.order = Order::reverse;
  else if (parts[0] == "sawtooth") spec.order = Order::sawtooth;
  else if (parts[0] == "dup") spec.order = Order::duplicate_heavy;
  else throw std::invalid_argument("unknown order '" + std::string(parts[0]) + "'");

  const std::string_view w = parts[1];
  if (w == "unit") {
    spec.weights = WeightDist::unit;
  } else if (w.starts_with("uniform(1..") && w.ends_with(")")) {
    spec.weights = WeightDist::uniform;
    spec.weight_max = detail::parse_u64(w.substr(11, w.size() - 12), "weight bound");
  } else if (w.starts_with("zipf(") && w.ends_with(")")) {
    const std::string_view args = w.substr(5, w.size() - 6);
    const std::size_t comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("zipf weights need zipf(s,B)");
    }
    spec.weights = WeightDist::zipf;
    spec.zipf_s = std::stod(std::string(args.substr(0, comma)));
    spec.weight_max = detail::parse_u64(args.substr(comma + 1), "weight bound");
  } else {
    throw std::invalid_argument("unknown weight distribution '" + std::string(w) + "'");
  }
  spec.seed = detail::parse_u64(parts[2], "seed");
  spec.n = detail::parse_u64(parts[3], "stream length");
  return spec;
}

/// Parses one input line: "v" or "v,w", surrounding whitespace allowed,
/// '#'-prefixed lines are comments. Returns nullopt for blank and comment
/// lines; throws on anything malformed.
inline std::optional<StreamItem> parse_line(std::string_view line) {
  const auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
      s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
      s.remove_suffix(1);
    }
    return s;
  };
  std::string_view text = trim(line);
  if (text.empty() || text.front() == '#') return std::nullopt;

  const std::size_t comma = text.find(',');
  const std::string_view value_text = trim(text.substr(0, comma));
  StreamItem item;
  const auto [vp, vec] =
      std::from_chars(value_text.data(), value_text.data() + value_text.size(), item.value);
  if (vec != std::errc{} || vp != value_text.data() + value_text.size()) {
    throw std::invalid_argument("bad value '" + std::string(value_text) + "'");
  }
  if (comma != std::string_view::npos) {
    const std::string_view weight_text = trim(text.substr(comma + 1));
    const auto [wp, wec] = std::from_chars(weight_text.data(),
                                           weight_text.data() + weight_text.size(), item.weight);
    if (wec != std::errc{} || wp != weight_text.data() + weight_text.size()) {
      throw std::invalid_argument("bad weight '" + std::string(weight_text) + "'");
    }
    if (item.weight == 0) throw std::invalid_argument("weight must be positive");
    if (item.weight > kMaxItemWeight) throw std::invalid_argument("weight exceeds 2^32 - 1");
  }
  return item;
}

inline std::string format_item(const StreamItem& item) {
  if (item.weight == 1) return std::to_string(item.value);
  return std::to_string(item.value) + "," + std::to_string(item.weight);
}

}  // namespace gksum
