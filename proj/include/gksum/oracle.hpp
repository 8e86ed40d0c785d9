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
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gksum/band_clock.hpp"
#include "gksum/compaction.hpp"
#include "gksum/fraction.hpp"
#include "gksum/summary.hpp"

namespace gksum {

/// Ground truth for verification: stores the whole stream and answers exact
/// rank and quantile questions about its unfolded form. Memory-unbounded by
/// design and gated to desk-scale inputs; it exists to verify, not to scale.
template <class T = std::int64_t, class Compare = std::less<T>>
class ExactOracle {
 public:
  static constexpr std::uint64_t kWeightGuard = 20'000'000;

  struct Item {
    T value;
    std::uint64_t weight;
    std::uint64_t arrival;
  };

  struct Window {
    std::uint64_t below = 0;    // total weight strictly below the value
    std::uint64_t through = 0;  // total weight up to and including the value
  };

  explicit ExactOracle(Compare cmp = Compare{}) : cmp_(cmp) {}

  void add(const T& value, std::uint64_t weight = 1) {
    if (weight == 0) throw std::invalid_argument("oracle: weight must be positive");
    if (weight > kWeightGuard || total_ > kWeightGuard - weight) {
      throw std::invalid_argument("oracle: stream exceeds the desk-scale weight guard");
    }
    items_.push_back({value, weight, static_cast<std::uint64_t>(items_.size())});
    total_ += weight;
    dirty_ = true;
  }

  std::uint64_t total_weight() const { return total_; }
  std::size_t item_count() const { return items_.size(); }
  const std::vector<Item>& stream() const { return items_; }

  /// Exact rank window of a value: (weight below, weight through). Rejects
  /// values that never appeared in the stream.
  Window window(const T& value) const {
    refresh();
    const auto it = cumulative_.find(CmpKey{value});
    if (it == cumulative_.end()) {
      throw std::invalid_argument("oracle: value not present in the stream");
    }
    return it->second;
  }

  bool contains(const T& value) const {
    refresh();
    const auto it = cumulative_.find(CmpKey{value});
    return it != cumulative_.end();
  }

  /// The exact ceil(phi * W)-th item of the unfolded sorted stream.
  T quantile(const Fraction& phi) const {
    if (items_.empty()) throw std::invalid_argument("oracle: empty stream has no quantiles");
    refresh();
    std::uint64_t r = phi.ceil_mul(total_);
    r = std::clamp<std::uint64_t>(r, 1, total_);
    auto it = std::lower_bound(
        sorted_.begin(), sorted_.end(), r,
        [](const std::pair<T, Window>& a, std::uint64_t rank) { return a.second.through < rank; });
    return it->first;
  }

  /// True when the answered value's rank window intersects
  /// [(phi - eps) * W, (phi + eps) * W], evaluated in exact integer
  /// arithmetic. A value that never appeared fails with a diagnostic.
  bool check_answer(const Fraction& phi, const T& value, const Fraction& eps,
                    std::string* why = nullptr) const {
    refresh();
    const auto it = cumulative_.find(CmpKey{value});
    if (it == cumulative_.end()) {
      if (why) *why = "answered value not present in the stream";
      return false;
    }
    const Window w = it->second;
    using I = __int128;
    const I d = static_cast<I>(phi.den) * eps.den;
    const I lo_num = static_cast<I>(phi.num) * eps.den - static_cast<I>(eps.num) * phi.den;
    const I hi_num = static_cast<I>(phi.num) * eps.den + static_cast<I>(eps.num) * phi.den;
    // (below, through] intersects [W*lo/d, W*hi/d]
    const bool ok = static_cast<I>(w.through) * d >= static_cast<I>(total_) * lo_num &&
                    static_cast<I>(w.below) * d < static_cast<I>(total_) * hi_num;
    if (!ok && why) {
      *why = "window (" + std::to_string(w.below) + ", " + std::to_string(w.through) +
             "] misses the target rank interval";
    }
    return ok;
  }

 private:
  struct CmpKey {
    T value;
  };
  struct CmpKeyLess {
    Compare cmp{};
    bool operator()(const CmpKey& a, const CmpKey& b) const { return cmp(a.value, b.value); }
  };

  void refresh() const {
    if (!dirty_) return;
    std::map<CmpKey, std::uint64_t, CmpKeyLess> totals{CmpKeyLess{cmp_}};
    for (const auto& item : items_) {
      totals[CmpKey{item.value}] += item.weight;
    }
    sorted_.clear();
    sorted_.reserve(totals.size());
    cumulative_ = std::map<CmpKey, Window, CmpKeyLess>{CmpKeyLess{cmp_}};
    std::uint64_t running = 0;
    for (const auto& [key, weight] : totals) {
      Window w{running, running + weight};
      running += weight;
      sorted_.emplace_back(key.value, w);
      cumulative_.emplace(key, w);
    }
    dirty_ = false;
  }

  Compare cmp_;
  std::vector<Item> items_;
  std::uint64_t total_ = 0;
  mutable bool dirty_ = false;
  mutable std::vector<std::pair<T, Window>> sorted_;
  mutable std::map<CmpKey, Window, CmpKeyLess> cumulative_{CmpKeyLess{}};
};

/// Tracks which stream items each stored entry accounts for, by listening to
/// the engine's insert and delete events, and audits the bookkeeping after
/// every deletion step:
///   - every coverage transfer lands on the deleted entry's successor and
///     the per-entry totals stay equal to G = g + weight - 1,
///   - covered sets stay disjoint and jointly cover the whole stream,
///   - an entry only ever covers items whose band value does not exceed its
///     own.
template <class T, class Compare = std::less<T>>
class CoverageAuditor {
 public:
  struct Report {
    std::uint64_t steps_audited = 0;
    std::vector<std::string> violations;
    bool clean() const { return violations.empty(); }
  };

  explicit CoverageAuditor(SummaryEngine<T, Compare>& engine) : engine_(&engine) {}

  /// Installs this auditor as the engine's sole hook consumer. Callers that
  /// need additional hooks can forward to the hook_* methods instead.
  void attach() {
    StepHooks<T> hooks;
    hooks.on_insert = [this](const InsertEvent<T>& ev) { hook_insert(ev); };
    hooks.on_delete = [this](const DeletionEvent<T>& ev) { hook_delete(ev); };
    hooks.on_step_end = [this](const DeletionStats& stats) { hook_step_end(stats); };
    engine_->set_hooks(std::move(hooks));
  }

  void hook_insert(const InsertEvent<T>& ev) {
    items_[ev.seq] = {ev.weight, ev.t0};
    covered_[ev.seq] = {ev.seq};
  }

  void hook_delete(const DeletionEvent<T>& ev) {
    auto node = covered_.extract(ev.deleted.seq);
    if (node.empty()) {
      report_.violations.push_back("deleted entry has no coverage record");
      return;
    }
    auto& dest = covered_[ev.successor_seq];
    dest.insert(dest.end(), node.mapped().begin(), node.mapped().end());
  }

  void hook_step_end(const DeletionStats& stats) { audit(stats); }

  const Report& report() const { return report_; }

 private:
  struct ItemInfo {
    std::uint64_t weight = 0;
    std::uint64_t t0 = 0;
  };

  void audit(const DeletionStats& stats) {
    ++report_.steps_audited;
    std::uint64_t covered_items = 0;
    static const std::vector<std::uint64_t> kEmpty;
    for (const auto& [key, meta] : engine_->summary()) {
      const bool sentinel = !key.value;
      const auto it = covered_.find(meta.seq);
      if (it == covered_.end() && !sentinel) {
        report_.violations.push_back("entry #" + std::to_string(meta.seq) +
                                     " lost its coverage record");
        continue;
      }
      const auto& covered = it == covered_.end() ? kEmpty : it->second;
      const std::uint32_t entry_band = band_value(meta.t0, stats.time);
      std::uint64_t weight_sum = sentinel ? 1 : 0;  // the sentinel covers its own unit copy
      for (const std::uint64_t item_seq : covered) {
        const ItemInfo& info = items_.at(item_seq);
        weight_sum += info.weight;
        if (band_value(info.t0, stats.time) > entry_band) {
          report_.violations.push_back("entry #" + std::to_string(meta.seq) +
                                       " covers younger-banded item #" +
                                       std::to_string(item_seq));
        }
      }
      if (weight_sum != meta.coverage()) {
        report_.violations.push_back(
            "entry #" + std::to_string(meta.seq) + " coverage weight " +
            std::to_string(weight_sum) + " != G " + std::to_string(meta.coverage()));
      }
      covered_items += covered.size();
    }
    // Moves keep the sets disjoint; completeness pins their union.
    if (covered_items != engine_->summary().elements_seen()) {
      report_.violations.push_back("covered sets do not partition the stream: " +
                                   std::to_string(covered_items) + " of " +
                                   std::to_string(engine_->summary().elements_seen()));
    }
  }

  SummaryEngine<T, Compare>* engine_;
  std::unordered_map<std::uint64_t, ItemInfo> items_;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> covered_;
  Report report_;
};

}  // namespace gksum
