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
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "blindpair/annotation_log.hpp"
#include "blindpair/bench.hpp"
#include "blindpair/embed_store.hpp"
#include "blindpair/miner.hpp"

namespace blindpair::curation {

// Mined pairs are addressed as "<i>-<j>" with decimal row indices.
std::string pair_id_of(const BlindPair& p);

enum class SortOrder { kGapDesc, kIndexAsc };
SortOrder parse_sort(std::string_view name);  // throws kValidation

// Filter value "none" selects pairs without any annotation.
struct StatusFilter {
  bool unannotated = false;
  std::optional<Status> status;
};
StatusFilter parse_status_filter(std::string_view name);

struct PairView {
  PairRecord record;
  std::string pair_id;
  std::optional<Annotation> annotation;  // latest, if any
};

struct PairPage {
  std::size_t page = 1;
  std::size_t page_size = 0;
  std::size_t total = 0;  // items matching the filter
  std::vector<PairView> items;
};

// Mined pairs plus the annotation log. Reads take a shared lock; writes are
// serialized and durable before they become visible.
class CurationStore {
 public:
  // Throws kConsistency when the log references a pair not in `pairs`.
  CurationStore(std::vector<PairRecord> pairs, CorpusManifest manifest,
                std::filesystem::path log_path);

  std::size_t pair_count() const noexcept { return pairs_.size(); }
  std::size_t log_length() const;
  const CorpusManifest& manifest() const noexcept { return manifest_; }

  // Pages are 1-based; a page past the end is empty.
  PairPage list_pairs(std::size_t page, std::size_t page_size, SortOrder sort,
                      StatusFilter filter = {}) const;
  std::optional<PairView> get_pair(const std::string& pair_id) const;

  // Throws kNotFound for unknown pairs, kValidation for bad annotations.
  std::uint64_t put_annotation(const std::string& pair_id, Annotation a);

  // Pair id -> latest annotation.
  std::map<std::string, Annotation> state() const;

  // Accepted annotations as a benchmark, pairs in (i, j) order. Throws
  // kValidation when nothing is accepted.
  bench::Benchmark export_benchmark() const;

 private:
  std::vector<PairRecord> pairs_;          // (i, j) order
  std::vector<std::size_t> by_gap_;        // indices into pairs_, rank_pairs order
  std::map<std::string, std::size_t> by_id_;
  CorpusManifest manifest_;
  mutable std::shared_mutex mutex_;
  AnnotationLog log_;
};

}  // namespace blindpair::curation
