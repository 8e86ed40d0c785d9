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
#include <optional>
#include <string>
#include <vector>

#include "gksum/compaction.hpp"
#include "gksum/oracle.hpp"
#include "gksum/query.hpp"
#include "gksum/stream_gen.hpp"
#include "gksum/summary.hpp"

namespace gksum {

/// g + delta <= max(1, t) for every entry, g >= 1, and delta <= t0. The
/// floor of one covers the opening stretch before the first full time step,
/// where every entry is fresh and exact.
template <class T, class C>
std::optional<std::string> check_rank_slack(const Summary<T, C>& summary, std::uint64_t time) {
  const std::uint64_t bound = std::max<std::uint64_t>(1, time);
  for (const auto& [key, meta] : summary) {
    const std::string label = key.value ? std::to_string(meta.seq) : std::string("sentinel");
    if (meta.g == 0) return "entry #" + label + " has g = 0";
    if (meta.delta > meta.t0) {
      return "entry #" + label + " has delta " + std::to_string(meta.delta) +
             " above its insertion time " + std::to_string(meta.t0);
    }
    if (meta.g > bound || meta.delta > bound - meta.g) {
      return "entry #" + label + " has g+delta = " + std::to_string(meta.g) + "+" +
             std::to_string(meta.delta) + " > " + std::to_string(bound) + " at t=" +
             std::to_string(time);
    }
  }
  return std::nullopt;
}

/// Sum of per-entry coverage must equal the total inserted weight plus the
/// sentinel's own unit copy.
template <class T, class C>
std::optional<std::string> check_conservation(const Summary<T, C>& summary) {
  unsigned __int128 covered = 0;
  for (const auto& [key, meta] : summary) covered += meta.coverage();
  const unsigned __int128 expected =
      static_cast<unsigned __int128>(summary.total_weight()) + 1;
  if (covered != expected) {
    return "coverage ledger " + std::to_string(static_cast<std::uint64_t>(covered)) +
           " != total weight + 1 = " +
           std::to_string(static_cast<std::uint64_t>(expected));
  }
  return std::nullopt;
}

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerifyOptions {
  Fraction epsilon{1, 10};
  Algorithm algorithm = Algorithm::gk_weighted;
  ScheduleMode schedule = ScheduleMode::paper_delay;
  bool smoothing = false;
  std::uint64_t grid_den = 100;  // quantile accuracy grid phi = 1/g .. (g-1)/g
  // Fault injection for exercising the battery itself: corrupts the
  // sentinel's delta after that many updates.
  std::optional<std::uint64_t> inject_delta_fault;
};

/// Runs the full invariant battery over one stream: rank-slack and ledger
/// checks plus the per-gap query condition after every deletion step, a
/// coverage audit, and a final grid of quantile queries checked against the
/// exact oracle. Returns one row per check.
inline std::vector<CheckResult> run_verification(const std::vector<StreamItem>& stream,
                                                 const VerifyOptions& options) {
  SummaryEngine<std::int64_t> engine(options.epsilon, options.algorithm, options.schedule,
                                     options.smoothing);
  CoverageAuditor<std::int64_t> auditor(engine);

  CheckResult invariant{"invariant_1", true, ""};
  CheckResult condition{"query_condition", true, ""};
  CheckResult ledger{"conservation", true, ""};
  // CoverageAuditor owns the engine hooks; layer the step checks on top.
  {
    StepHooks<std::int64_t> hooks;
    CoverageAuditor<std::int64_t>* aud = &auditor;
    SummaryEngine<std::int64_t>* eng = &engine;
    hooks.on_insert = [aud](const InsertEvent<std::int64_t>& ev) { aud->hook_insert(ev); };
    hooks.on_delete = [aud](const DeletionEvent<std::int64_t>& ev) { aud->hook_delete(ev); };
    hooks.on_step_end = [aud, eng, &invariant, &condition, &ledger](const DeletionStats& s) {
      aud->hook_step_end(s);
      if (invariant.pass) {
        if (auto err = check_rank_slack(eng->summary(), s.time)) {
          invariant.pass = false;
          invariant.detail = *err;
        }
      }
      if (ledger.pass) {
        if (auto err = check_conservation(eng->summary())) {
          ledger.pass = false;
          ledger.detail = *err;
        }
      }
      if (condition.pass) {
        Snapshot<std::int64_t> snap(eng->summary());
        if (!snap.query_condition_holds()) {
          condition.pass = false;
          condition.detail = "per-gap condition violated at t=" + std::to_string(s.time);
        }
      }
    };
    engine.set_hooks(std::move(hooks));
  }

  ExactOracle<std::int64_t> oracle;
  std::uint64_t processed = 0;
  for (const StreamItem& item : stream) {
    engine.process(item.value, item.weight);
    oracle.add(item.value, item.weight);
    ++processed;
    if (options.inject_delta_fault && processed == *options.inject_delta_fault) {
      detail::TestAccess::corrupt_sentinel_delta(engine.summary_mut(), ~std::uint64_t{0} / 2);
    }
  }
  engine.flush();

  // The same state checks once more on the final, flushed summary.
  if (invariant.pass) {
    if (auto err = check_rank_slack(engine.summary(), engine.summary().current_time())) {
      invariant.pass = false;
      invariant.detail = *err;
    }
  }
  if (ledger.pass) {
    if (auto err = check_conservation(engine.summary())) {
      ledger.pass = false;
      ledger.detail = *err;
    }
  }
  if (condition.pass && !Snapshot<std::int64_t>(engine.summary()).query_condition_holds()) {
    condition.pass = false;
    condition.detail = "per-gap condition violated after flush";
  }

  CheckResult coverage{"coverage_audit", auditor.report().clean(), ""};
  if (!coverage.pass) coverage.detail = auditor.report().violations.front();

  CheckResult accuracy{"grid_accuracy", true, ""};
  if (!stream.empty()) {
    Snapshot<std::int64_t> snap(engine.summary());
    const Fraction eps = engine.effective_epsilon();
    for (std::uint64_t k = 1; k < options.grid_den && accuracy.pass; ++k) {
      const Fraction phi(k, options.grid_den);
      const auto answer = snap.quantile(phi);
      std::string why;
      if (answer.is_sentinel ||
          !oracle.check_answer(phi, *answer.value, eps, &why)) {
        accuracy.pass = false;
        accuracy.detail = "phi=" + phi.str() + ": " + (answer.is_sentinel ? "sentinel answered" : why);
      }
    }
  }

  CheckResult fixed_point{"fixed_point", true, ""};
  const DeletionStats again = engine.deletion_step();
  if (again.deleted != 0) {
    fixed_point.pass = false;
    fixed_point.detail = "rerun deleted " + std::to_string(again.deleted) + " entries";
  }

  return {invariant, condition, ledger, coverage, accuracy, fixed_point};
}

}  // namespace gksum
