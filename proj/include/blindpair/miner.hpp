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
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blindpair/embed_store.hpp"

namespace blindpair {

// A pair qualifies when sim_a > tau_high and sim_b < tau_low. Both
// comparisons are strict and are evaluated in float, against the thresholds
// rounded to float.
struct MinerConfig {
  double tau_high = 0.95;
  double tau_low = 0.6;
  std::size_t tile = 1024;
  std::optional<std::size_t> max_pairs;
  // Tiles never overlap, so with dedup on the final unique pass is a no-op
  // check; it is kept so the output contract does not depend on tiling.
  bool dedup = true;

  void validate() const;  // throws kValidation
};

struct BlindPair {
  std::uint64_t i = 0;  // i < j
  std::uint64_t j = 0;
  float sim_a = 0.0F;
  float sim_b = 0.0F;
  float gap = 0.0F;     // sim_a - sim_b

  bool operator==(const BlindPair&) const = default;
};

struct MinerStats {
  std::uint64_t pairs_scanned = 0;   // i < j pairs considered
  std::uint64_t pruned = 0;          // rejected by the partial-sum bound in space A
  std::uint64_t candidates_a = 0;    // sim_a > tau_high
  std::uint64_t matched = 0;         // also sim_b < tau_low, before max_pairs
};

bool qualifies(float sim_a, float sim_b, const MinerConfig& cfg);

// Tiled exact scan. Both matrices must be normalized with equal row counts;
// their widths may differ. The result is sorted by (i, j) and is identical
// for every worker count. When cfg.max_pairs is set, the max_pairs pairs with
// the largest gap survive (ties by ascending (i, j)).
std::vector<BlindPair> mine_blind_pairs(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                        const MinerConfig& cfg, std::size_t workers = 1,
                                        MinerStats* stats = nullptr);

// Naive double loop with the same contract. Reference for equivalence tests.
std::vector<BlindPair> brute_force_mine(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                        const MinerConfig& cfg);

// Gap descending, ties by (i, j) ascending.
std::vector<BlindPair> rank_pairs(std::vector<BlindPair> pairs);

// Line-delimited records {i, j, image_id_i, image_id_j, sim_a, sim_b, gap}.
// Floats are written in shortest round-trip form so reading a file back
// reproduces the values bit-exactly.
void write_pairs(std::ostream& out, std::span<const BlindPair> pairs,
                 const CorpusManifest& manifest);
struct PairRecord {
  BlindPair pair;
  std::string image_id_i;
  std::string image_id_j;
};
std::vector<PairRecord> read_pairs(std::istream& in);
void write_pair_records(std::ostream& out, std::span<const PairRecord> records);

}  // namespace blindpair
