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
#include "blindpair/curation.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

#include "blindpair/error.hpp"

namespace blindpair::curation {

std::string pair_id_of(const BlindPair& p) { return std::to_string(p.i) + "-" + std::to_string(p.j); }

SortOrder parse_sort(std::string_view name) {
  if (name == "gap_desc") return SortOrder::kGapDesc;
  if (name == "index_asc") return SortOrder::kIndexAsc;
  throw Error(ErrorKind::kValidation, "unknown sort '" + std::string(name) + "' (gap_desc|index_asc)");
}

StatusFilter parse_status_filter(std::string_view name) {
  if (name.empty()) return {};
  if (name == "none") return {true, std::nullopt};
  return {false, parse_status(name)};
}

CurationStore::CurationStore(std::vector<PairRecord> pairs, CorpusManifest manifest,
                             std::filesystem::path log_path)
    : pairs_(std::move(pairs)), manifest_(std::move(manifest)), log_(std::move(log_path)) {
  std::sort(pairs_.begin(), pairs_.end(), [](const PairRecord& x, const PairRecord& y) {
    return x.pair.i != y.pair.i ? x.pair.i < y.pair.i : x.pair.j < y.pair.j;
  });
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    auto& r = pairs_[k];
    if (manifest_.size() > 0) {
      if (r.pair.j >= manifest_.size()) {
        throw Error(ErrorKind::kConsistency, "pair " + pair_id_of(r.pair) + " is outside the manifest");
      }
      if (r.image_id_i.empty()) r.image_id_i = manifest_.at(r.pair.i).image_id;
      if (r.image_id_j.empty()) r.image_id_j = manifest_.at(r.pair.j).image_id;
    }
    if (!by_id_.emplace(pair_id_of(r.pair), k).second) {
      throw Error(ErrorKind::kConsistency, "pair " + pair_id_of(r.pair) + " listed twice");
    }
  }

  std::vector<BlindPair> plain;
  plain.reserve(pairs_.size());
  for (const auto& r : pairs_) plain.push_back(r.pair);
  plain = rank_pairs(std::move(plain));
  by_gap_.reserve(plain.size());
  for (const auto& p : plain) by_gap_.push_back(by_id_.at(pair_id_of(p)));

  for (const auto& [pair_id, idx] : log_.latest_index()) {
    if (!by_id_.contains(pair_id)) {
      throw Error(ErrorKind::kConsistency, "annotation log references unknown pair " + pair_id);
    }
  }
}

std::size_t CurationStore::log_length() const {
  std::shared_lock lock(mutex_);
  return log_.records().size();
}

PairPage CurationStore::list_pairs(std::size_t page, std::size_t page_size, SortOrder sort,
                                   StatusFilter filter) const {
  if (page < 1) throw Error(ErrorKind::kValidation, "page numbers start at 1");
  if (page_size < 1) throw Error(ErrorKind::kValidation, "page size must be at least 1");
  std::shared_lock lock(mutex_);

  auto keep = [&](const Annotation* a) {
    if (filter.unannotated) return a == nullptr;
    if (filter.status) return a != nullptr && a->status == *filter.status;
    return true;
  };

  PairPage out;
  out.page = page;
  out.page_size = page_size;
  const std::size_t first = (page - 1) * page_size;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const std::size_t idx = sort == SortOrder::kGapDesc ? by_gap_[k] : k;
    const auto& r = pairs_[idx];
    const std::string id = pair_id_of(r.pair);
    const Annotation* a = log_.latest(id);
    if (!keep(a)) continue;
    if (out.total >= first && out.items.size() < page_size) {
      out.items.push_back({r, id, a ? std::optional<Annotation>(*a) : std::nullopt});
    }
    ++out.total;
  }
  return out;
}

std::optional<PairView> CurationStore::get_pair(const std::string& pair_id) const {
  std::shared_lock lock(mutex_);
  auto it = by_id_.find(pair_id);
  if (it == by_id_.end()) return std::nullopt;
  const Annotation* a = log_.latest(pair_id);
  return PairView{pairs_[it->second], pair_id, a ? std::optional<Annotation>(*a) : std::nullopt};
}

std::uint64_t CurationStore::put_annotation(const std::string& pair_id, Annotation a) {
  if (!by_id_.contains(pair_id)) throw Error(ErrorKind::kNotFound, "unknown pair " + pair_id);
  if (!a.pair_id.empty() && a.pair_id != pair_id) {
    throw Error(ErrorKind::kValidation, "annotation pair_id does not match the addressed pair");
  }
  a.pair_id = pair_id;
  std::unique_lock lock(mutex_);
  return log_.append(std::move(a)).seq;
}

std::map<std::string, Annotation> CurationStore::state() const {
  std::shared_lock lock(mutex_);
  std::map<std::string, Annotation> out;
  for (const auto& [pair_id, idx] : log_.latest_index()) out.emplace(pair_id, log_.records()[idx]);
  return out;
}

bench::Benchmark CurationStore::export_benchmark() const {
  std::shared_lock lock(mutex_);
  bench::Benchmark doc;
  for (const auto& r : pairs_) {
    const std::string id = pair_id_of(r.pair);
    const Annotation* a = log_.latest(id);
    if (a == nullptr || a->status != Status::kAccepted) continue;
    bench::BenchmarkPair p;
    p.pair_id = id;
    p.images = {r.image_id_i, r.image_id_j};
    for (const auto& q : a->questions) {
      auto& out = p.questions[static_cast<std::size_t>(q.image_slot)];
      out.question_id = id + "-q" + std::to_string(q.image_slot);
      out.text = q.text;
      out.options = q.options;
      out.correct_index = q.correct_index;
    }
    p.patterns = a->patterns;
    doc.pairs.push_back(std::move(p));
  }
  if (doc.pairs.empty()) throw Error(ErrorKind::kValidation, "no accepted annotations to export");
  bench::validate(doc.pairs);
  return doc;
}

}  // namespace blindpair::curation
