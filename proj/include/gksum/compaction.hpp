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
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gksum/band_clock.hpp"
#include "gksum/fraction.hpp"
#include "gksum/summary.hpp"

namespace gksum {

/// Which entries a deletion step may remove.
///   greedy_adjacent: any entry alone, judged against its right neighbor.
///   segment_merge:   an entry together with its whole segment (the maximal
///                    run of immediate predecessors with strictly smaller
///                    band value), or not at all.
enum class CompactionRule { greedy_adjacent, segment_merge };

inline CompactionRule rule_of(Algorithm a) {
  switch (a) {
    case Algorithm::gk_unweighted:
    case Algorithm::gk_weighted:
      return CompactionRule::segment_merge;
    default:
      return CompactionRule::greedy_adjacent;
  }
}

/// When deletion steps run.
///   every_step:  after every completed time step (unweighted) or after
///                every update (weighted). Exists for fidelity testing.
///   paper_delay: deletion steps are spaced out; the spacing grows with the
///                clock so the amortized cost per update stays small.
///   manual:      never automatically; the caller drives deletion_step().
enum class ScheduleMode { every_step, paper_delay, manual };

struct DeletionStats {
  std::uint64_t examined = 0;
  std::uint64_t deleted = 0;
  std::uint64_t groups = 0;
  std::uint64_t time = 0;  // frozen time step the conditions were checked against
};

struct BandG {
  std::uint32_t band = 0;
  std::uint64_t coverage = 0;  // G = g + weight - 1
};

struct SegmentAggregates {
  std::vector<std::uint64_t> gstar;      // own coverage plus the segment's
  std::vector<std::size_t> seg_begin;    // first index of the segment (== i when empty)
};

/// Aggregated coverage G* for every position of a value-ordered list in one
/// stack pass: each element pops the stack tops with strictly smaller band
/// value, summing their aggregates into its own, then pushes itself. Each
/// index is pushed and popped at most once.
inline SegmentAggregates compute_segments(const std::vector<BandG>& items) {
  SegmentAggregates out;
  out.gstar.resize(items.size());
  out.seg_begin.resize(items.size());
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::uint64_t acc = items[i].coverage;
    while (!stack.empty() && items[stack.back()].band < items[i].band) {
      acc += out.gstar[stack.back()];
      stack.pop_back();
    }
    out.gstar[i] = acc;
    out.seg_begin[i] = stack.empty() ? 0 : stack.back() + 1;
    stack.push_back(i);
  }
  return out;
}

inline std::vector<std::uint64_t> compute_gstar(const std::vector<BandG>& items) {
  return compute_segments(items).gstar;
}

/// Deletion-work units to perform per arrival when one deletion step is
/// spread across the first half of a delay window of `gap_arrivals` updates.
inline std::uint64_t smoothed_step_budget(std::uint64_t summary_size, std::uint64_t gap_arrivals) {
  if (summary_size == 0) return 0;
  if (gap_arrivals == 0) return 2 * summary_size;
  return (2 * summary_size + gap_arrivals - 1) / gap_arrivals;
}

template <class T>
struct EntrySnapshot {
  std::optional<T> value;
  std::uint64_t g = 0;
  std::uint64_t delta = 0;
  std::uint64_t weight = 0;
  std::uint64_t t0 = 0;
  std::uint64_t seq = 0;
  std::uint32_t band = 0;
  std::uint64_t gstar = 0;  // equals coverage under the greedy rule
  bool is_sentinel = false;
};

template <class T>
struct DeletionEvent {
  EntrySnapshot<T> deleted;
  std::uint64_t successor_seq = 0;
  std::optional<T> successor_value;
  std::uint32_t successor_band = 0;
  std::uint64_t step = 0;
  std::uint64_t group = 0;
  bool segment_member = false;  // true for segment entries, false for the lead
};

template <class T>
struct InsertEvent {
  const T* value = nullptr;
  std::uint64_t seq = 0;
  std::uint64_t weight = 0;
  std::uint64_t t0 = 0;
  std::uint64_t delta = 0;
};

/// Observation points for instrumented runs; unset hooks cost nothing.
template <class T>
struct StepHooks {
  std::function<void(const std::vector<EntrySnapshot<T>>&, std::uint64_t)> on_step_begin;
  std::function<void(const DeletionEvent<T>&)> on_delete;
  std::function<void(const DeletionStats&)> on_step_end;
  std::function<void(const InsertEvent<T>&)> on_insert;
};

/// Streaming quantile summary engine: feeds updates into a Summary and runs
/// deletion steps according to the configured rule and schedule.
///
/// A deletion step freezes the clock and an ordered snapshot of the entries,
/// annotates band values (and segment aggregates under segment_merge), then
/// walks from the largest entry to the smallest. An entry e is removed -- by
/// itself, or with its entire frozen segment -- when
///     band(e) <= band(right neighbor)   and
///     lhs(e) + g(right neighbor) + delta(right neighbor) <= time,
/// where lhs is e's coverage (greedy) or aggregated coverage G* (segments)
/// and the right neighbor is the live successor after earlier removals.
/// One backward pass reaches a fixed point: removals only grow a survivor's
/// g, which can only harden the remaining conditions.
template <class T, class Compare = std::less<T>>
class SummaryEngine {
 public:
  using summary_type = Summary<T, Compare>;

  SummaryEngine(Fraction epsilon, Algorithm algorithm,
                ScheduleMode schedule = ScheduleMode::paper_delay, bool smoothing = false)
      : summary_(ell_from_epsilon(epsilon)),
        alg_(algorithm),
        mode_(schedule),
        smooth_(smoothing) {
    if (smooth_ && mode_ != ScheduleMode::paper_delay) {
      throw std::invalid_argument("SummaryEngine: smoothing requires the delayed schedule");
    }
  }

  /// ell = max(1, round(1/epsilon)); the engine works at effective error 1/ell.
  static std::uint64_t ell_from_epsilon(const Fraction& epsilon) {
    if (epsilon.num == 0 || epsilon.num >= epsilon.den) {
      throw std::invalid_argument("epsilon must lie strictly between 0 and 1");
    }
    const unsigned __int128 rounded =
        (static_cast<unsigned __int128>(2) * epsilon.den + epsilon.num) /
        (static_cast<unsigned __int128>(2) * epsilon.num);
    return rounded == 0 ? 1 : static_cast<std::uint64_t>(rounded);
  }

  Fraction effective_epsilon() const { return Fraction(1, summary_.ell()); }

  void process(const T& value, std::uint64_t weight = 1) {
    if (!algorithm_is_weighted(alg_) && weight != 1) {
      throw std::invalid_argument("process: unweighted algorithm requires weight 1");
    }
    if (smooth_ && phase_ != Phase::idle) {
      absorb_smoothed(value, weight);
      return;
    }
    do_insert(value, weight);
    maybe_compact();
  }

  /// Runs one deletion step now, regardless of the schedule.
  DeletionStats deletion_step() {
    finish_smoothing();
    return run_deletion_step();
  }

  /// End-of-stream finalization: completes any pending smoothed work and
  /// forces a final deletion step. Idempotent.
  void flush() {
    finish_smoothing();
    run_deletion_step();
    last_compaction_time_ = summary_.current_time();
  }

  const summary_type& summary() const { return summary_; }
  summary_type& summary_mut() { return summary_; }
  Algorithm algorithm() const { return alg_; }
  ScheduleMode schedule() const { return mode_; }
  CompactionRule rule() const { return rule_of(alg_); }
  bool smoothing_enabled() const { return smooth_; }
  bool smoothing_active() const { return phase_ != Phase::idle; }
  std::size_t buffered() const { return buffer_.size(); }
  std::uint64_t next_trigger() const { return next_trigger_; }
  std::uint64_t steps_performed() const { return steps_; }
  std::size_t size() const { return summary_.size(); }

  void set_hooks(StepHooks<T> hooks) { hooks_ = std::move(hooks); }

 private:
  enum class Phase { idle, working, draining };

  struct Frozen {
    typename summary_type::handle it;
    std::uint32_t band = 0;
    std::uint64_t coverage = 0;
  };

  struct Pass {
    std::vector<Frozen> frozen;
    SegmentAggregates seg;
    std::size_t cursor = 0;
    std::size_t succ = 0;
    bool done = true;
    DeletionStats stats;
  };

  void do_insert(const T& value, std::uint64_t weight) {
    const auto it = summary_.insert(value, weight);
    if (hooks_.on_insert) {
      InsertEvent<T> ev;
      ev.value = &*it->first.value;
      ev.seq = it->second.seq;
      ev.weight = weight;
      ev.t0 = it->second.t0;
      ev.delta = it->second.delta;
      hooks_.on_insert(ev);
    }
  }

  void maybe_compact() {
    if (mode_ == ScheduleMode::manual) return;
    const bool weighted = algorithm_is_weighted(alg_);
    if (mode_ == ScheduleMode::every_step) {
      if (weighted) {
        run_deletion_step();
      } else {
        const std::uint64_t t = summary_.current_time();
        if (t > last_compaction_time_) {
          run_deletion_step();
          last_compaction_time_ = t;
        }
      }
      return;
    }
    const std::uint64_t pos = weighted ? summary_.elements_seen() : summary_.current_time();
    if (pos >= next_trigger_) fire_delayed_step(pos);
  }

  // Delay increments per configuration: the greedy rules wait ceil(log^2 t)
  // time steps (ell * that, in elements, when weighted counts elements); the
  // segment rules wait ceil(log t) time steps or ceil(ell log t) elements.
  // Floored at one so the trigger always advances.
  void fire_delayed_step(std::uint64_t pos) {
    const std::uint64_t t = summary_.current_time();
    const bool weighted = algorithm_is_weighted(alg_);
    const bool greedy = rule_of(alg_) == CompactionRule::greedy_adjacent;
    std::uint64_t incr;
    if (weighted) {
      incr = greedy ? summary_.ell() * ceil_log2_squared(t) : ceil_mul_log2(summary_.ell(), t);
    } else {
      incr = greedy ? ceil_log2_squared(t) : ceil_log2(t);
    }
    if (incr == 0) incr = 1;
    next_trigger_ = pos + incr;
    const std::uint64_t gap_arrivals = weighted ? incr : incr * summary_.ell();
    if (smooth_) {
      begin_smoothed_step(gap_arrivals);
    } else {
      run_deletion_step();
    }
  }

  void prepare_pass(Pass& pass) {
    pass.stats = DeletionStats{};
    pass.stats.time = summary_.current_time();
    const std::size_t count = summary_.entry_count();
    pass.frozen.clear();
    pass.frozen.reserve(count);
    for (auto it = summary_.begin_entries(); it != summary_.end_entries(); ++it) {
      pass.frozen.push_back(
          {it, band_value(it->second.t0, pass.stats.time), it->second.coverage()});
    }
    if (rule_of(alg_) == CompactionRule::segment_merge) {
      std::vector<BandG> bands(count);
      for (std::size_t i = 0; i < count; ++i) {
        bands[i] = {pass.frozen[i].band, pass.frozen[i].coverage};
      }
      pass.seg = compute_segments(bands);
    } else {
      pass.seg = SegmentAggregates{};
    }
    pass.succ = count - 1;
    pass.cursor = count >= 2 ? count - 2 : 0;
    pass.done = count < 2;
    ++steps_;
    if (hooks_.on_step_begin) {
      std::vector<EntrySnapshot<T>> view;
      view.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        view.push_back(snapshot_of(pass, i));
      }
      hooks_.on_step_begin(view, pass.stats.time);
    }
  }

  EntrySnapshot<T> snapshot_of(const Pass& pass, std::size_t i) const {
    const Frozen& f = pass.frozen[i];
    EntrySnapshot<T> s;
    s.value = f.it->first.value;
    s.g = f.it->second.g;
    s.delta = f.it->second.delta;
    s.weight = f.it->second.weight;
    s.t0 = f.it->second.t0;
    s.seq = f.it->second.seq;
    s.band = f.band;
    s.gstar = pass.seg.gstar.empty() ? f.coverage : pass.seg.gstar[i];
    s.is_sentinel = !f.it->first.value;
    return s;
  }

  // Examines one candidate; deletes it (and, under segment_merge, its whole
  // frozen segment) when both conditions hold. Left-side aggregates stay
  // valid because the pass never revisits anything to the right of the
  // cursor, and transfers only ever land on already-visited entries.
  void advance_pass(Pass& pass) {
    const bool segments = rule_of(alg_) == CompactionRule::segment_merge;
    ++pass.stats.examined;
    const std::size_t i = pass.cursor;
    const Frozen& cand = pass.frozen[i];
    const Frozen& nb = pass.frozen[pass.succ];
    const EntryMeta& nb_meta = nb.it->second;
    const std::uint64_t lhs = segments ? pass.seg.gstar[i] : cand.coverage;
    const bool band_ok = cand.band <= nb.band;
    const bool rank_ok = static_cast<unsigned __int128>(lhs) + nb_meta.g + nb_meta.delta <=
                         pass.stats.time;
    if (band_ok && rank_ok) {
      const std::size_t begin = segments ? pass.seg.seg_begin[i] : i;
      ++pass.stats.groups;
      for (std::size_t j = i + 1; j-- > begin;) {
        if (hooks_.on_delete) {
          DeletionEvent<T> ev;
          ev.deleted = snapshot_of(pass, j);
          ev.successor_seq = nb_meta.seq;
          ev.successor_value = nb.it->first.value;
          ev.successor_band = nb.band;
          ev.step = steps_;
          ev.group = pass.stats.groups;
          ev.segment_member = j != i;
          hooks_.on_delete(ev);
        }
        summary_.erase(pass.frozen[j].it);
        ++pass.stats.deleted;
      }
      if (begin == 0) {
        pass.done = true;
      } else {
        pass.cursor = begin - 1;
      }
    } else {
      pass.succ = i;
      if (i == 0) {
        pass.done = true;
      } else {
        pass.cursor = i - 1;
      }
    }
  }

  DeletionStats run_deletion_step() {
    Pass pass;
    prepare_pass(pass);
    while (!pass.done) advance_pass(pass);
    if (hooks_.on_step_end) hooks_.on_step_end(pass.stats);
    return pass.stats;
  }

  void begin_smoothed_step(std::uint64_t gap_arrivals) {
    budget_ = smoothed_step_budget(summary_.size(), gap_arrivals);
    if (budget_ == 0 || gap_arrivals < 2) {
      run_deletion_step();
      return;
    }
    prepare_pass(pass_);
    if (pass_.done) {
      if (hooks_.on_step_end) hooks_.on_step_end(pass_.stats);
      return;
    }
    phase_ = Phase::working;
  }

  // While deletion work is pending, arrivals queue in a buffer; once the work
  // is done they are reinserted two per arrival, so the buffer is empty again
  // by the end of the delay window and never holds more than O(s) items.
  void absorb_smoothed(const T& value, std::uint64_t weight) {
    buffer_.emplace_back(value, weight);
    if (phase_ == Phase::working) {
      for (std::uint64_t unit = 0; unit < budget_ && !pass_.done; ++unit) {
        advance_pass(pass_);
      }
      if (pass_.done) {
        if (hooks_.on_step_end) hooks_.on_step_end(pass_.stats);
        phase_ = Phase::draining;
      }
    }
    if (phase_ == Phase::draining) {
      for (int k = 0; k < 2 && !buffer_.empty(); ++k) {
        const auto [v, w] = buffer_.front();
        buffer_.pop_front();
        do_insert(v, w);
      }
      if (buffer_.empty()) {
        phase_ = Phase::idle;
        maybe_compact();
      }
    }
  }

  void finish_smoothing() {
    if (phase_ == Phase::idle) return;
    if (phase_ == Phase::working) {
      while (!pass_.done) advance_pass(pass_);
      if (hooks_.on_step_end) hooks_.on_step_end(pass_.stats);
    }
    while (!buffer_.empty()) {
      const auto [v, w] = buffer_.front();
      buffer_.pop_front();
      do_insert(v, w);
    }
    phase_ = Phase::idle;
  }

  summary_type summary_;
  Algorithm alg_;
  ScheduleMode mode_;
  bool smooth_;
  std::uint64_t next_trigger_ = 2;
  std::uint64_t last_compaction_time_ = 0;
  std::uint64_t steps_ = 0;
  StepHooks<T> hooks_;

  Phase phase_ = Phase::idle;
  Pass pass_;
  std::uint64_t budget_ = 0;
  std::deque<std::pair<T, std::uint64_t>> buffer_;
};

}  // namespace gksum
