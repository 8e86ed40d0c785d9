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
#include <cstdint>
#include <optional>
#include <vector>

#include "gksum/fraction.hpp"
#include "gksum/summary.hpp"

namespace gksum {

/// Immutable prefix-sum view of a summary. Construction is one ordered pass;
/// quantile and rank queries are binary searches. Snapshots may be shared and
/// queried concurrently.
template <class T, class Compare = std::less<T>>
class Snapshot {
 public:
  struct Row {
    std::optional<T> value;
    std::uint64_t weight = 1;
    std::uint64_t rmin = 0;
    std::uint64_t rmax = 0;
    bool is_sentinel = false;
  };

  struct Answer {
    std::optional<T> value;  // nullopt only for the empty summary
    RankBounds bounds;
    std::uint64_t weight = 1;
    bool is_sentinel = false;
  };

  explicit Snapshot(const Summary<T, Compare>& summary, Compare cmp = Compare{})
      : cmp_(cmp), ell_(summary.ell()), total_(summary.total_weight() + 1) {
    const auto rows = summary.rank_bounds();
    values_.reserve(rows.size() - 1);
    weights_.reserve(rows.size());
    rmins_.reserve(rows.size());
    rmaxs_.reserve(rows.size());
    for (const auto& row : rows) {
      if (!row.is_sentinel) values_.push_back(*row.value);
      weights_.push_back(row.weight);
      rmins_.push_back(row.bounds.rmin);
      rmaxs_.push_back(row.bounds.rmax);
    }
  }

  /// Answer a phi-quantile. phi is clamped to [0, 1]; the target rank is
  /// r = ceil(phi * N) over the N = W + 1 unfolded positions (sentinel
  /// included), and the answer is the canonical entry whose unfolded copy
  /// range meets [r - eN, r + eN]: the smallest entry with rmin >= r - eN,
  /// stepped back once when the predecessor's copy range already reaches
  /// that far. The sentinel is never answered while a real entry exists.
  Answer quantile(const Fraction& phi) const {
    const std::uint64_t n = total_;
    std::uint64_t r = phi.ceil_mul(n);
    r = std::clamp<std::uint64_t>(r, 1, n);
    const std::uint64_t slack = n / ell_;
    const std::uint64_t target = r > slack ? r - slack : 1;
    std::size_t j = static_cast<std::size_t>(
        std::lower_bound(rmins_.begin(), rmins_.end(), target) - rmins_.begin());
    if (j > 0 && rmins_[j - 1] + weights_[j - 1] - 1 >= target) --j;
    if (j == values_.size() && j > 0) --j;  // never answer the sentinel for a nonempty stream
    Answer a;
    a.bounds = {rmins_[j], rmaxs_[j]};
    a.weight = weights_[j];
    a.is_sentinel = j == values_.size();
    if (!a.is_sentinel) a.value = values_[j];
    return a;
  }

  /// Bounds on the unfolded rank of the largest stored entry <= value,
  /// widened over that entry's copies. Values below every stored entry get
  /// the empty-prefix encoding (0, 0).
  RankBounds rank(const T& value) const {
    const std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(values_.begin(), values_.end(), value, cmp_) - values_.begin());
    if (idx == 0) return {0, 0};
    const std::size_t e = idx - 1;
    return {rmins_[e] + weights_[e] - 1, rmaxs_[e + 1] - 1};
  }

  /// True when every adjacent pair satisfies
  ///   rmax(e_i) - (rmin(e_{i-1}) + w(e_{i-1}) - 1) <= max(1, floor(eps * W)),
  /// the per-gap condition that makes every quantile query answerable within
  /// the error budget. The floor of one chunk covers streams shorter than a
  /// single time step, where the summary is exact anyway.
  bool query_condition_holds() const {
    if (values_.empty()) return true;  // sentinel only, no gaps
    const std::uint64_t bound = std::max<std::uint64_t>(1, (total_ - 1) / ell_);
    std::uint64_t prev_rmin = 0;
    std::uint64_t prev_weight = 1;
    for (std::size_t i = 0; i < rmins_.size(); ++i) {
      const std::uint64_t gap = rmaxs_[i] - (prev_rmin + prev_weight - 1);
      if (gap > bound) return false;
      prev_rmin = rmins_[i];
      prev_weight = weights_[i];
    }
    return true;
  }

  /// Unfolded positions including the sentinel's one copy.
  std::uint64_t total_unfolded() const { return total_; }
  std::uint64_t ell() const { return ell_; }
  Fraction effective_epsilon() const { return Fraction(1, ell_); }
  /// Stored real entries.
  std::size_t size() const { return values_.size(); }

  Row row(std::size_t i) const {
    Row r;
    if (i < values_.size()) r.value = values_[i];
    r.is_sentinel = i == values_.size();
    r.weight = weights_[i];
    r.rmin = rmins_[i];
    r.rmax = rmaxs_[i];
    return r;
  }

 private:
  Compare cmp_;
  std::uint64_t ell_;
  std::uint64_t total_;
  std::vector<T> values_;            // real entries, ascending
  std::vector<std::uint64_t> weights_;  // parallel arrays, sentinel last
  std::vector<std::uint64_t> rmins_;
  std::vector<std::uint64_t> rmaxs_;
};

}  // namespace gksum
