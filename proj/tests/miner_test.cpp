/* Copyright 2026 The blindpair Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "blindpair/error.hpp"
#include "blindpair/miner.hpp"
#include "test_util.hpp"

namespace blindpair {
namespace {

using testing::clustered_matrix;
using testing::random_unit_matrix;

std::set<std::pair<std::uint64_t, std::uint64_t>> keys(const std::vector<BlindPair>& pairs) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& p : pairs) out.insert({p.i, p.j});
  return out;
}

double naive_cos(const EmbeddingMatrix& m, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t e = 0; e < m.dim(); ++e) s += static_cast<double>(m.row(i)[e]) * m.row(j)[e];
  return s;
}

TEST(Miner, IdenticalSpacesYieldNothing) {
  const auto a = clustered_matrix(300, 32, 5, 0.05, 3);
  MinerConfig cfg;
  EXPECT_TRUE(mine_blind_pairs(a, a, cfg).empty());
  EXPECT_TRUE(brute_force_mine(a, a, cfg).empty());
}

TEST(Miner, HandBuiltThreeImageCorpus) {
  const auto a = EmbeddingMatrix::from_unit_rows(3, 2, {1, 0, 1, 0, 0, 1});
  const auto b = EmbeddingMatrix::from_unit_rows(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const std::vector<BlindPair> expected{{0, 1, 1.0F, 0.0F, 1.0F}};
  EXPECT_EQ(mine_blind_pairs(a, b, MinerConfig{}), expected);
  EXPECT_EQ(brute_force_mine(a, b, MinerConfig{}), expected);
}

TEST(Miner, RelaxedThresholdsMatchOracles) {
  const auto a = random_unit_matrix(500, 8, 11);
  const auto b = random_unit_matrix(500, 8, 12);
  MinerConfig cfg;
  cfg.tau_high = 0.3;
  cfg.tau_low = 0.2;
  cfg.tile = 64;
  const auto mined = mine_blind_pairs(a, b, cfg, 4);
  const auto brute = brute_force_mine(a, b, cfg);
  ASSERT_FALSE(brute.empty());
  EXPECT_EQ(mined, brute);

  // Independent double-precision oracle: agreement away from the boundary.
  const auto found = keys(mined);
  std::size_t certain = 0;
  std::size_t ambiguous = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t j = i + 1; j < 500; ++j) {
      const double sa = naive_cos(a, i, j);
      const double sb = naive_cos(b, i, j);
      const bool clearly_in = sa > cfg.tau_high + 1e-5 && sb < cfg.tau_low - 1e-5;
      const bool clearly_out = sa < cfg.tau_high - 1e-5 || sb > cfg.tau_low + 1e-5;
      if (clearly_in) {
        ++certain;
        EXPECT_TRUE(found.contains({i, j})) << i << "," << j;
      } else if (clearly_out) {
        EXPECT_FALSE(found.contains({i, j})) << i << "," << j;
      } else {
        ++ambiguous;
      }
    }
  }
  EXPECT_LE(certain, found.size());
  EXPECT_LE(found.size(), certain + ambiguous);
  for (const auto& p : mined) {
    EXPECT_NEAR(p.sim_a, naive_cos(a, p.i, p.j), 1e-6);
    EXPECT_NEAR(p.sim_b, naive_cos(b, p.i, p.j), 1e-6);
    EXPECT_NEAR(p.gap, static_cast<double>(p.sim_a) - p.sim_b, 1e-6);
  }
}

TEST(Miner, PrunedHighDimensionalScanMatchesBruteForce) {
  // Tight clusters in space A, looser ones in space B with different centers.
  const auto a = clustered_matrix(600, 768, 40, 0.15, 21);
  const auto b = clustered_matrix(600, 512, 3, 2.0, 22);
  MinerConfig cfg;
  MinerStats stats;
  const auto mined = mine_blind_pairs(a, b, cfg, 3, &stats);
  const auto brute = brute_force_mine(a, b, cfg);
  EXPECT_EQ(mined, brute);
  EXPECT_GT(stats.pruned, 0U);
  EXPECT_GT(stats.candidates_a, 0U);
  EXPECT_EQ(stats.pairs_scanned, 600U * 599U / 2U);
  EXPECT_EQ(stats.matched, mined.size());
}

TEST(Miner, IndependentOfTileAndWorkerCount) {
  const auto a = clustered_matrix(257, 16, 12, 0.4, 5);
  const auto b = random_unit_matrix(257, 24, 6);
  MinerConfig cfg;
  cfg.tau_high = 0.8;
  cfg.tau_low = 0.3;
  cfg.tile = 1024;
  const auto reference = mine_blind_pairs(a, b, cfg, 1);
  ASSERT_FALSE(reference.empty());
  for (std::size_t tile : {1U, 7U, 64U, 100U, 257U}) {
    for (std::size_t workers : {1U, 2U, 8U}) {
      cfg.tile = tile;
      EXPECT_EQ(mine_blind_pairs(a, b, cfg, workers), reference) << tile << "/" << workers;
    }
  }
}

TEST(Miner, OutputIsCanonical) {
  const auto a = clustered_matrix(200, 8, 6, 0.5, 8);
  const auto b = random_unit_matrix(200, 8, 9);
  MinerConfig cfg;
  cfg.tau_high = 0.5;
  cfg.tau_low = 0.5;
  cfg.tile = 13;
  const auto pairs = mine_blind_pairs(a, b, cfg, 2);
  ASSERT_FALSE(pairs.empty());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    EXPECT_LT(pairs[k].i, pairs[k].j);
    EXPECT_TRUE(qualifies(pairs[k].sim_a, pairs[k].sim_b, cfg));
    if (k > 0) {
      EXPECT_TRUE(std::pair(pairs[k - 1].i, pairs[k - 1].j) < std::pair(pairs[k].i, pairs[k].j));
    }
  }
}

TEST(Miner, ThresholdsAreMonotone) {
  const auto a = random_unit_matrix(300, 6, 31);
  const auto b = random_unit_matrix(300, 6, 32);
  const std::vector<double> highs{0.2, 0.4, 0.6, 0.8};
  const std::vector<double> lows{0.5, 0.3, 0.0, -0.3};
  std::vector<std::vector<std::set<std::pair<std::uint64_t, std::uint64_t>>>> grid;
  for (double hi : highs) {
    grid.emplace_back();
    for (double lo : lows) {
      MinerConfig cfg;
      cfg.tau_high = hi;
      cfg.tau_low = lo;
      grid.back().push_back(keys(mine_blind_pairs(a, b, cfg)));
    }
  }
  auto subset = [](const auto& small, const auto& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
  };
  ASSERT_FALSE(grid[0][0].empty());
  for (std::size_t h = 0; h < highs.size(); ++h) {
    for (std::size_t l = 0; l < lows.size(); ++l) {
      if (h > 0) {
        EXPECT_TRUE(subset(grid[h][l], grid[h - 1][l]));
      }
      if (l > 0) {
        EXPECT_TRUE(subset(grid[h][l], grid[h][l - 1]));
      }
    }
  }
}

TEST(Miner, BoundaryValuesAreExcluded) {
  // Row 1 of space A is (0.95f, sqrt(1 - 0.95^2)) so its dot with (1, 0) is
  // exactly 0.95f; space B does the same with 0.6f.
  auto unit = [](float x) { return std::vector<float>{x, static_cast<float>(std::sqrt(1.0 - double(x) * x))}; };
  auto corpus = [&](float x) {
    std::vector<float> rows{1.0F, 0.0F};
    const auto r = unit(x);
    rows.insert(rows.end(), r.begin(), r.end());
    return EmbeddingMatrix::from_unit_rows(2, 2, rows);
  };
  const float a_at = 0.95F;
  const float a_above = std::nextafter(a_at, 1.0F);
  const float b_at = 0.6F;
  const float b_below = std::nextafter(b_at, 0.0F);
  MinerConfig cfg;
  ASSERT_EQ(cosine(corpus(a_at), 0, 1), a_at);
  ASSERT_EQ(cosine(corpus(b_at), 0, 1), b_at);

  EXPECT_TRUE(mine_blind_pairs(corpus(a_at), corpus(b_below), cfg).empty());
  EXPECT_TRUE(mine_blind_pairs(corpus(a_above), corpus(b_at), cfg).empty());
  EXPECT_EQ(mine_blind_pairs(corpus(a_above), corpus(b_below), cfg).size(), 1U);
  EXPECT_FALSE(qualifies(a_at, 0.0F, cfg));
  EXPECT_FALSE(qualifies(1.0F, b_at, cfg));
  EXPECT_TRUE(qualifies(a_above, b_below, cfg));
}

TEST(Miner, MaxPairsKeepsLargestGaps) {
  const auto a = random_unit_matrix(150, 4, 51);
  const auto b = random_unit_matrix(150, 4, 52);
  MinerConfig cfg;
  cfg.tau_high = 0.2;
  cfg.tau_low = 0.4;
  const auto all = brute_force_mine(a, b, cfg);
  ASSERT_GT(all.size(), 40U);
  cfg.max_pairs = 25;
  const auto capped = mine_blind_pairs(a, b, cfg, 3);
  ASSERT_EQ(capped.size(), 25U);
  EXPECT_EQ(capped, brute_force_mine(a, b, cfg));
  auto ranked = rank_pairs(all);
  ranked.resize(25);
  EXPECT_EQ(keys(capped), keys(ranked));
  EXPECT_TRUE(std::is_sorted(capped.begin(), capped.end(), [](const BlindPair& x, const BlindPair& y) {
    return std::pair(x.i, x.j) < std::pair(y.i, y.j);
  }));
}

TEST(Miner, RejectsBadInputs) {
  const auto a = random_unit_matrix(10, 4, 1);
  const auto b = random_unit_matrix(11, 4, 2);
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  EXPECT_EQ(kind([&] { mine_blind_pairs(a, b, MinerConfig{}); }), ErrorKind::kConsistency);
  EXPECT_EQ(kind([&] { brute_force_mine(a, b, MinerConfig{}); }), ErrorKind::kConsistency);
  const auto raw = EmbeddingMatrix::from_rows(10, 4, std::vector<float>(a.data().begin(), a.data().end()));
  EXPECT_EQ(kind([&] { mine_blind_pairs(raw, a, MinerConfig{}); }), ErrorKind::kValidation);
  MinerConfig bad;
  bad.tau_high = 1.5;
  EXPECT_EQ(kind([&] { mine_blind_pairs(a, a, bad); }), ErrorKind::kValidation);
  bad = MinerConfig{};
  bad.tile = 0;
  EXPECT_EQ(kind([&] { mine_blind_pairs(a, a, bad); }), ErrorKind::kValidation);
}

TEST(RankPairs, OrdersByGapThenIndex) {
  std::vector<BlindPair> pairs{{0, 1, 0.9F, 0.7F, 0.2F}, {0, 2, 0.95F, 0.05F, 0.9F}, {1, 2, 0.9F, 0.4F, 0.5F}};
  const auto ranked = rank_pairs(pairs);
  EXPECT_EQ(ranked[0].gap, 0.9F);
  EXPECT_EQ(ranked[1].gap, 0.5F);
  EXPECT_EQ(ranked[2].gap, 0.2F);

  std::vector<BlindPair> ties{{3, 4, 0.9F, 0.4F, 0.5F}, {1, 9, 0.9F, 0.4F, 0.5F}, {1, 2, 0.9F, 0.4F, 0.5F}};
  const auto tied = rank_pairs(ties);
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  EXPECT_EQ(Key(tied[0].i, tied[0].j), Key(1, 2));
  EXPECT_EQ(Key(tied[1].i, tied[1].j), Key(1, 9));
  EXPECT_EQ(Key(tied[2].i, tied[2].j), Key(3, 4));
}

TEST(RankPairs, IsANonIncreasingPermutation) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> gap_bucket(0, 50);  // coarse buckets force ties
  std::vector<BlindPair> pairs;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const float gap = static_cast<float>(gap_bucket(rng)) / 50.0F;
    pairs.push_back({k, k + 1 + (k * 7919) % 13, 0.96F, 0.96F - gap, gap});
  }
  const auto ranked = rank_pairs(pairs);
  auto sorted_in = pairs;
  auto sorted_out = ranked;
  auto by_key = [](const BlindPair& x, const BlindPair& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); };
  std::sort(sorted_in.begin(), sorted_in.end(), by_key);
  std::sort(sorted_out.begin(), sorted_out.end(), by_key);
  EXPECT_EQ(sorted_in, sorted_out);
  for (std::size_t k = 1; k < ranked.size(); ++k) EXPECT_GE(ranked[k - 1].gap, ranked[k].gap);
}

TEST(PairFiles, RoundTripIsBitExact) {
  const auto a = random_unit_matrix(120, 5, 61);
  const auto b = random_unit_matrix(120, 5, 62);
  MinerConfig cfg;
  cfg.tau_high = 0.3;
  cfg.tau_low = 0.1;
  const auto pairs = mine_blind_pairs(a, b, cfg);
  std::vector<ManifestEntry> entries;
  for (int k = 0; k < 120; ++k) entries.push_back({"id\"" + std::to_string(k), "p", "s", std::nullopt});
  const CorpusManifest manifest(entries);
  std::ostringstream out;
  write_pairs(out, pairs, manifest);
  std::istringstream in(out.str());
  const auto records = read_pairs(in);
  ASSERT_EQ(records.size(), pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    EXPECT_EQ(records[k].pair, pairs[k]);
    EXPECT_EQ(records[k].image_id_i, manifest.at(pairs[k].i).image_id);
  }
  std::ostringstream again;
  write_pair_records(again, records);
  EXPECT_EQ(again.str(), out.str());
}

}  // namespace
}  // namespace blindpair
