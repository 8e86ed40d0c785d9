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
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gksum/band_clock.hpp"

namespace gksum {

namespace detail {
struct TestAccess;
}

/// The four maintenance strategies. The unweighted pair requires weight-1
/// updates; the weighted pair accepts arbitrary positive integer weights.
enum class Algorithm {
  greedy_unweighted,
  gk_unweighted,
  gk_weighted,
  greedy_weighted,
};

inline bool algorithm_is_weighted(Algorithm a) {
  return a == Algorithm::gk_weighted || a == Algorithm::greedy_weighted;
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::greedy_unweighted: return "greedy";
    case Algorithm::gk_unweighted: return "gk";
    case Algorithm::gk_weighted: return "wgk";
    case Algorithm::greedy_weighted: return "wgreedy";
  }
  return "?";
}

struct RankBounds {
  std::uint64_t rmin = 0;
  std::uint64_t rmax = 0;
};

/// Metadata kept per stored element.
struct EntryMeta {
  std::uint64_t g = 1;       // rank increment past the predecessor's last copy
  std::uint64_t delta = 0;   // rank uncertainty, frozen at insertion
  std::uint64_t weight = 1;  // number of copies this update represents
  std::uint64_t t0 = 0;      // insertion time step
  std::uint64_t seq = 0;     // arrival number; breaks ties among equal values

  // Unfolded weight this entry accounts for, its own copies plus everything
  // absorbed from deleted neighbors.
  std::uint64_t coverage() const { return g + weight - 1; }
};

// Largest accepted per-update weight.
inline constexpr std::uint64_t kMaxItemWeight = 0xFFFFFFFFull;

/// Ordered store of summary entries with the two primitive mutations.
///
/// Entries are kept in a balanced tree ordered by value; equal values are
/// ordered by arrival so that a new duplicate lands after the stored copies.
/// A single +inf sentinel anchors the top end: it is created with the
/// summary, is never deleted, and absorbs coverage from deletions of the
/// largest real entry. Rank bounds are not stored; they are reconstructed
/// from (g, delta, weight) prefix sums on demand.
template <class T, class Compare = std::less<T>>
class Summary {
 public:
  struct Key {
    std::optional<T> value;  // nullopt marks the +inf sentinel
    std::uint64_t seq = 0;
  };

  struct KeyLess {
    Compare cmp{};
    bool operator()(const Key& a, const Key& b) const {
      if (!a.value) return false;  // sentinel sorts after everything
      if (!b.value) return true;
      if (cmp(*a.value, *b.value)) return true;
      if (cmp(*b.value, *a.value)) return false;
      return a.seq < b.seq;
    }
  };

  using map_type = std::map<Key, EntryMeta, KeyLess>;
  using handle = typename map_type::iterator;
  using const_iterator = typename map_type::const_iterator;

  explicit Summary(std::uint64_t ell, Compare cmp = Compare{})
      : ell_(ell), entries_(KeyLess{cmp}) {
    if (ell == 0) throw std::invalid_argument("Summary: ell must be positive");
    entries_.emplace(Key{std::nullopt, 0}, EntryMeta{1, 0, 1, 0, ~std::uint64_t{0}});
  }

  /// Stores one update. The new entry starts with g = 1 and inherits its
  /// uncertainty from the smallest strictly larger stored entry, so existing
  /// rank bounds shift implicitly through the prefix sums.
  handle insert(const T& value, std::uint64_t weight) {
    if (weight == 0) throw std::invalid_argument("insert: weight must be positive");
    if (weight > kMaxItemWeight) throw std::invalid_argument("insert: weight exceeds 2^32 - 1");
    if (total_weight_ > std::numeric_limits<std::uint64_t>::max() - weight) {
      throw std::overflow_error("insert: total stream weight would overflow");
    }
    const auto succ = entries_.upper_bound(Key{value, ~std::uint64_t{0}});
    EntryMeta meta;
    meta.g = 1;
    meta.delta = succ->second.g + succ->second.delta - 1;
    meta.weight = weight;
    meta.t0 = insertion_time(total_weight_, ell_);
    meta.seq = next_seq_;
    const auto it = entries_.emplace_hint(succ, Key{value, next_seq_}, meta);
    ++next_seq_;
    ++elements_seen_;
    total_weight_ += weight;
    return it;
  }

  /// Removes an entry. Its successor absorbs the removed coverage, keeping
  /// every survivor's reconstructed rank bounds unchanged.
  void erase(handle pos) {
    if (!pos->first.value) throw std::invalid_argument("erase: cannot delete the sentinel");
    const auto succ = std::next(pos);
    succ->second.g += pos->second.coverage();
    entries_.erase(pos);
  }

  struct RankRow {
    std::optional<T> value;
    RankBounds bounds;
    std::uint64_t weight = 1;
    std::uint64_t g = 0;
    std::uint64_t delta = 0;
    std::uint64_t t0 = 0;
    std::uint64_t seq = 0;
    bool is_sentinel = false;
  };

  /// Rank bounds of every entry (sentinel last), rebuilt in one ordered pass:
  /// rmin is g plus the coverage of all predecessors, rmax is rmin + delta.
  std::vector<RankRow> rank_bounds() const {
    std::vector<RankRow> rows;
    rows.reserve(entries_.size());
    std::uint64_t covered = 0;
    for (const auto& [key, meta] : entries_) {
      RankRow row;
      row.value = key.value;
      row.bounds.rmin = covered + meta.g;
      row.bounds.rmax = row.bounds.rmin + meta.delta;
      row.weight = meta.weight;
      row.g = meta.g;
      row.delta = meta.delta;
      row.t0 = meta.t0;
      row.seq = meta.seq;
      row.is_sentinel = !key.value;
      rows.push_back(std::move(row));
      covered += meta.coverage();
    }
    return rows;
  }

  std::uint64_t ell() const { return ell_; }
  std::uint64_t total_weight() const { return total_weight_; }
  std::uint64_t elements_seen() const { return elements_seen_; }
  std::uint64_t current_time() const { return gksum::current_time(total_weight_, ell_); }

  /// Number of stored stream elements, sentinel excluded.
  std::size_t size() const { return entries_.size() - 1; }
  /// Number of stored entries including the sentinel.
  std::size_t entry_count() const { return entries_.size(); }

  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  handle begin_entries() { return entries_.begin(); }
  handle end_entries() { return entries_.end(); }

  /// Locates a stored entry by value (the earliest arrival among equals).
  handle find_value(const T& value) {
    auto it = entries_.lower_bound(Key{value, 0});
    if (it == entries_.end() || !it->first.value) return entries_.end();
    const KeyLess& less = entries_.key_comp();
    if (less.cmp(value, *it->first.value)) return entries_.end();
    return it;
  }

 private:
  friend struct detail::TestAccess;

  std::uint64_t ell_;
  map_type entries_;
  std::uint64_t total_weight_ = 0;
  std::uint64_t elements_seen_ = 0;
  std::uint64_t next_seq_ = 0;
};

namespace detail {

/// Backdoor for tests: builds summaries in arbitrary prepared states and
/// corrupts fields to exercise the verification paths.
struct TestAccess {
  template <class T>
  struct Row {
    T value;
    std::uint64_t g = 1;
    std::uint64_t delta = 0;
    std::uint64_t weight = 1;
    std::uint64_t t0 = 0;
  };

  template <class T, class C>
  static void load_state(Summary<T, C>& s, const std::vector<Row<T>>& rows,
                         std::uint64_t sentinel_g, std::uint64_t total_weight,
                         std::uint64_t elements_seen) {
    s.entries_.clear();
    s.next_seq_ = 0;
    for (const auto& row : rows) {
      EntryMeta meta{row.g, row.delta, row.weight, row.t0, s.next_seq_};
      s.entries_.emplace(typename Summary<T, C>::Key{row.value, s.next_seq_}, meta);
      ++s.next_seq_;
    }
    s.entries_.emplace(typename Summary<T, C>::Key{std::nullopt, 0},
                       EntryMeta{sentinel_g, 0, 1, 0, ~std::uint64_t{0}});
    s.total_weight_ = total_weight;
    s.elements_seen_ = elements_seen;
  }

  template <class T, class C>
  static void set_total_weight(Summary<T, C>& s, std::uint64_t w) {
    s.total_weight_ = w;
  }

  template <class T, class C>
  static void corrupt_delta(Summary<T, C>& s, const T& value, std::uint64_t delta) {
    auto it = s.find_value(value);
    if (it != s.end_entries()) it->second.delta = delta;
  }

  template <class T, class C>
  static void corrupt_sentinel_delta(Summary<T, C>& s, std::uint64_t delta) {
    std::prev(s.end_entries())->second.delta = delta;
  }
};

}  // namespace detail

}  // namespace gksum
