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

#include "gksum/summary.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "gksum/compaction.hpp"
#include "gksum/stream_gen.hpp"

namespace gksum {
namespace {

using Engine = SummaryEngine<std::int64_t>;
using Load = detail::TestAccess::Row<std::int64_t>;

TEST(EngineConfig, EllFromEpsilon) {
  EXPECT_EQ(Engine::ell_from_epsilon(Fraction::parse_decimal("0.5")), 2u);
  EXPECT_EQ(Engine::ell_from_epsilon(Fraction::parse_decimal("0.01")), 100u);
  EXPECT_EQ(Engine::ell_from_epsilon(Fraction::parse_decimal("0.003")), 333u);
  EXPECT_THROW(Engine::ell_from_epsilon(Fraction(0, 1)), std::invalid_argument);
  EXPECT_THROW(Engine::ell_from_epsilon(Fraction(1, 1)), std::invalid_argument);
  EXPECT_THROW(Engine::ell_from_epsilon(Fraction(3, 2)), std::invalid_argument);
  const Engine engine(Fraction::parse_decimal("0.003"), Algorithm::gk_weighted);
  EXPECT_EQ(engine.effective_epsilon(), Fraction(1, 333));
}

TEST(Summary, FreshSummaryHoldsOnlySentinel) {
  Summary<std::int64_t> s(2);
  EXPECT_EQ(s.size(), 0u);
  EXPECT_EQ(s.entry_count(), 1u);
  const auto rows = s.rank_bounds();
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].is_sentinel);
  EXPECT_EQ(rows[0].g, 1u);
  EXPECT_EQ(rows[0].delta, 0u);
  EXPECT_EQ(rows[0].weight, 1u);
}

TEST(Summary, FirstInsertIsExact) {
  Summary<std::int64_t> s(4);
  const auto it = s.insert(42, 1);
  EXPECT_EQ(it->second.g, 1u);
  EXPECT_EQ(it->second.delta, 0u);  // sentinel contributes g=1, delta=0
  EXPECT_EQ(it->second.t0, 0u);
}

// Weighted worked example: entries 10, 21, 30 with
// (g, delta, w) = (3,2,4), (3,3,2), (7,0,3), so G = (6, 4, 9).
std::vector<Load> weighted_example() {
  return {{10, 3, 2, 4, 0}, {21, 3, 3, 2, 0}, {30, 7, 0, 3, 0}};
}

TEST(Summary, ReconstructWeightedExample) {
  Summary<std::int64_t> s(10);
  detail::TestAccess::load_state(s, weighted_example(), 1, 19, 3);
  const auto rows = s.rank_bounds();
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].bounds.rmin, 3u);
  EXPECT_EQ(rows[0].bounds.rmax, 5u);
  EXPECT_EQ(rows[1].bounds.rmin, 9u);
  EXPECT_EQ(rows[1].bounds.rmax, 12u);
  EXPECT_EQ(rows[2].bounds.rmin, 17u);
  EXPECT_EQ(rows[2].bounds.rmax, 17u);
  // sentinel pins the total: all inserted weight plus its own copy
  EXPECT_TRUE(rows[3].is_sentinel);
  EXPECT_EQ(rows[3].bounds.rmin, 20u);
  EXPECT_EQ(rows[3].bounds.rmax, 20u);
}

TEST(Summary, WeightedInsertExample) {
  Summary<std::int64_t> s(10);
  detail::TestAccess::load_state(s, weighted_example(), 1, 19, 3);
  const auto it = s.insert(25, 2);
  EXPECT_EQ(it->second.g, 1u);
  EXPECT_EQ(it->second.delta, 6u);  // successor 30 has g=7, delta=0
  EXPECT_EQ(it->second.weight, 2u);
  const auto rows = s.rank_bounds();
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[2].bounds.rmin, 11u);  // the new 25
  EXPECT_EQ(rows[2].bounds.rmax, 17u);
  EXPECT_EQ(rows[3].bounds.rmin, 19u);  // 30 shifted by the new weight
  EXPECT_EQ(rows[3].bounds.rmax, 19u);
  EXPECT_EQ(rows[0].bounds.rmin, 3u);  // entries below are untouched
  EXPECT_EQ(rows[1].bounds.rmin, 9u);
}

TEST(Summary, WeightedDeleteExample) {
  Summary<std::int64_t> s(10);
  detail::TestAccess::load_state(s, weighted_example(), 1, 19, 3);
  s.insert(25, 2);
  const auto before = s.rank_bounds();
  const auto doomed = s.find_value(10);
  ASSERT_NE(doomed, s.end_entries());
  s.erase(doomed);
  const auto rows = s.rank_bounds();
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].g, 9u);  // 21 absorbed G(10) = 6
  EXPECT_EQ(rows[0].delta, 3u);
  EXPECT_EQ(rows[0].weight, 2u);
  EXPECT_EQ(rows[0].g + rows[0].weight - 1, 10u);  // G(21) after the merge
  // survivors keep bit-identical bounds
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].bounds.rmin, before[i + 1].bounds.rmin);
    EXPECT_EQ(rows[i].bounds.rmax, before[i + 1].bounds.rmax);
  }
}

// Unweighted worked example: same values with unit weights and
// (g, delta) = (3,2), (3,3), (7,0).
std::vector<Load> unweighted_example() {
  return {{10, 3, 2, 1, 0}, {21, 3, 3, 1, 0}, {30, 7, 0, 1, 0}};
}

TEST(Summary, UnweightedInsertAndDeleteExample) {
  Summary<std::int64_t> s(10);
  detail::TestAccess::load_state(s, unweighted_example(), 1, 13, 3);
  auto rows = s.rank_bounds();
  EXPECT_EQ(rows[0].bounds.rmin, 3u);
  EXPECT_EQ(rows[0].bounds.rmax, 5u);
  EXPECT_EQ(rows[1].bounds.rmin, 6u);
  EXPECT_EQ(rows[1].bounds.rmax, 9u);
  EXPECT_EQ(rows[2].bounds.rmin, 13u);
  EXPECT_EQ(rows[2].bounds.rmax, 13u);

  const auto it = s.insert(25, 1);
  EXPECT_EQ(it->second.g, 1u);
  EXPECT_EQ(it->second.delta, 6u);
  rows = s.rank_bounds();
  EXPECT_EQ(rows[2].bounds.rmin, 7u);
  EXPECT_EQ(rows[2].bounds.rmax, 13u);
  EXPECT_EQ(rows[3].bounds.rmin, 14u);
  EXPECT_EQ(rows[3].bounds.rmax, 14u);

  s.erase(s.find_value(10));
  rows = s.rank_bounds();
  EXPECT_EQ(rows[0].g, 6u);  // 21 absorbed g(10) = 3
  EXPECT_EQ(rows[0].delta, 3u);
  EXPECT_EQ(rows[0].bounds.rmin, 6u);
  EXPECT_EQ(rows[0].bounds.rmax, 9u);
}

TEST(Summary, DeleteUnitEntryAddsOne) {
  Summary<std::int64_t> s(4);
  s.insert(1, 1);
  s.insert(2, 1);
  const auto doomed = s.find_value(1);
  const std::uint64_t g_before = s.find_value(2)->second.g;
  s.erase(doomed);
  EXPECT_EQ(s.find_value(2)->second.g, g_before + 1);  // G = 1 + 1 - 1
}

TEST(Summary, ReconstructMatchesDirectFormula) {
  // 20 random entries; expected bounds evaluated straight from the two
  // displayed prefix-sum formulas, independent of rank_bounds' running pass.
  SplitMix64 rng(7);
  std::vector<Load> rows;
  std::int64_t v = 0;
  for (int i = 0; i < 20; ++i) {
    v += 1 + static_cast<std::int64_t>(rng.below(9));
    rows.push_back(Load{v, 1 + rng.below(50), rng.below(40), 1 + rng.below(6), 0});
  }
  Summary<std::int64_t> s(10);
  std::uint64_t total = 0;
  for (const auto& r : rows) total += r.g + r.weight - 1;
  detail::TestAccess::load_state(s, rows, 1, total, rows.size());

  const auto got = s.rank_bounds();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::uint64_t rmin = rows[i].g;
    for (std::size_t j = 0; j < i; ++j) rmin += rows[j].g + rows[j].weight - 1;
    const std::uint64_t rmax = rmin + rows[i].delta;
    EXPECT_EQ(got[i].bounds.rmin, rmin) << i;
    EXPECT_EQ(got[i].bounds.rmax, rmax) << i;
  }
}

TEST(Summary, OrderingAndConservationUnderRandomOps) {
  SplitMix64 rng(99);
  Summary<std::int64_t> s(8);
  for (int step = 0; step < 2000; ++step) {
    if (s.size() > 4 && rng.below(3) == 0) {
      // delete a random non-sentinel entry
      auto it = s.begin_entries();
      std::advance(it, static_cast<long>(rng.below(s.size())));
      s.erase(it);
    } else {
      s.insert(static_cast<std::int64_t>(rng.below(1000)), 1 + rng.below(9));
    }
    if (step % 37 != 0) continue;
    const auto rows = s.rank_bounds();
    unsigned __int128 ledger = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ledger += rows[i].g + rows[i].weight - 1;
      if (i > 0) {
        ASSERT_GE(rows[i].bounds.rmin, rows[i - 1].bounds.rmin + rows[i - 1].weight);
        ASSERT_LE(rows[i].bounds.rmin, rows[i].bounds.rmax);
      }
    }
    ASSERT_EQ(static_cast<std::uint64_t>(ledger), s.total_weight() + 1);
  }
}

TEST(Summary, DeletionNeverMovesSurvivorBounds) {
  SplitMix64 rng(5);
  Summary<std::int64_t> s(6);
  for (int i = 0; i < 300; ++i) s.insert(static_cast<std::int64_t>(rng.below(500)), 1 + rng.below(4));
  for (int round = 0; round < 100; ++round) {
    const auto before = s.rank_bounds();
    const std::size_t victim = rng.below(s.size());
    auto it = s.begin_entries();
    std::advance(it, static_cast<long>(victim));
    s.erase(it);
    const auto after = s.rank_bounds();
    ASSERT_EQ(after.size(), before.size() - 1);
    for (std::size_t i = 0; i < after.size(); ++i) {
      const auto& survivor = before[i < victim ? i : i + 1];
      ASSERT_EQ(after[i].bounds.rmin, survivor.bounds.rmin);
      ASSERT_EQ(after[i].bounds.rmax, survivor.bounds.rmax);
    }
  }
}

TEST(Summary, EqualValuesKeepArrivalOrder) {
  Summary<std::int64_t> s(4);
  const auto first = s.insert(5, 1);
  const auto second = s.insert(5, 1);
  EXPECT_EQ(std::next(first), second);  // newer duplicate sits above the older
  EXPECT_EQ(second->second.delta, 0u);  // its uncertainty comes from the sentinel
}

TEST(Summary, InputValidation) {
  Summary<std::int64_t> s(4);
  EXPECT_THROW(s.insert(1, 0), std::invalid_argument);
  EXPECT_THROW(s.insert(1, kMaxItemWeight + 1), std::invalid_argument);
  s.insert(7, 1);
  EXPECT_THROW(s.erase(std::prev(s.end_entries())), std::invalid_argument);  // sentinel
  detail::TestAccess::set_total_weight(s, ~std::uint64_t{0} - 1);
  EXPECT_THROW(s.insert(2, 5), std::overflow_error);
}

TEST(Summary, GenericOverAnyOrderedType) {
  Summary<std::string> s(4);
  s.insert("pear", 2);
  s.insert("apple", 1);
  s.insert("fig", 3);
  const auto rows = s.rank_bounds();
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(*rows[0].value, "apple");
  EXPECT_EQ(*rows[1].value, "fig");
  EXPECT_EQ(*rows[2].value, "pear");
  EXPECT_EQ(rows[3].bounds.rmin, s.total_weight() + 1);
}

}  // namespace
}  // namespace gksum
