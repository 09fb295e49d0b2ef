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

#include "blindpair/bench_io.hpp"
#include "blindpair/curation.hpp"
#include "blindpair/error.hpp"
#include "curation_fixtures.hpp"
#include "test_util.hpp"

namespace blindpair::curation {
namespace {

using testing::chain_pairs;
using testing::make_annotation;
using testing::small_manifest;
using testing::TempDir;

ErrorKind kind_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

TEST(CurationStore, PaginatesInGapOrder) {
  TempDir dir;
  const CurationStore store(chain_pairs(4), small_manifest(4), dir / "log.jsonl");
  const auto first = store.list_pairs(1, 2, SortOrder::kGapDesc);
  EXPECT_EQ(first.total, 3U);
  ASSERT_EQ(first.items.size(), 2U);
  EXPECT_EQ(first.items[0].pair_id, "0-1");
  EXPECT_GE(first.items[0].record.pair.gap, first.items[1].record.pair.gap);
  const auto second = store.list_pairs(2, 2, SortOrder::kGapDesc);
  ASSERT_EQ(second.items.size(), 1U);
  EXPECT_EQ(second.items[0].pair_id, "2-3");
  EXPECT_TRUE(store.list_pairs(3, 2, SortOrder::kGapDesc).items.empty());
  EXPECT_EQ(store.list_pairs(1, 10, SortOrder::kIndexAsc).items[2].pair_id, "2-3");
  EXPECT_EQ(kind_of([&] { store.list_pairs(0, 2, SortOrder::kGapDesc); }), ErrorKind::kValidation);
  EXPECT_EQ(kind_of([&] { store.list_pairs(1, 0, SortOrder::kGapDesc); }), ErrorKind::kValidation);
}

TEST(CurationStore, FiltersByStatus) {
  TempDir dir;
  CurationStore store(chain_pairs(5), small_manifest(5), dir / "log.jsonl");
  store.put_annotation("0-1", make_annotation("0-1", Status::kAccepted));
  store.put_annotation("1-2", make_annotation("1-2", Status::kDraft));
  store.put_annotation("1-2", make_annotation("1-2", Status::kRejected));
  EXPECT_EQ(store.list_pairs(1, 10, SortOrder::kGapDesc, parse_status_filter("none")).total, 2U);
  EXPECT_EQ(store.list_pairs(1, 10, SortOrder::kGapDesc, parse_status_filter("draft")).total, 0U);
  const auto rejected = store.list_pairs(1, 10, SortOrder::kGapDesc, parse_status_filter("rejected"));
  ASSERT_EQ(rejected.total, 1U);
  EXPECT_EQ(rejected.items[0].annotation->seq, 3U);
  EXPECT_EQ(store.log_length(), 3U);
}

TEST(CurationStore, PutValidatesAndStateSurvivesRestart) {
  TempDir dir;
  const auto log = dir / "log.jsonl";
  {
    CurationStore store(chain_pairs(4), small_manifest(4), log);
    EXPECT_EQ(kind_of([&] { store.put_annotation("7-8", make_annotation("7-8", Status::kDraft)); }),
              ErrorKind::kNotFound);
    EXPECT_EQ(kind_of([&] { store.put_annotation("0-1", make_annotation("1-2", Status::kDraft)); }),
              ErrorKind::kValidation);
    auto bad = make_annotation("0-1", Status::kAccepted);
    bad.patterns.clear();
    EXPECT_EQ(kind_of([&] { store.put_annotation("0-1", bad); }), ErrorKind::kValidation);
    EXPECT_EQ(store.log_length(), 0U);
    EXPECT_EQ(store.put_annotation("0-1", make_annotation("0-1", Status::kDraft)), 1U);
    EXPECT_EQ(store.put_annotation("2-3", make_annotation("2-3", Status::kAccepted, "bob", 3)), 2U);
  }
  const CurationStore reopened(chain_pairs(4), small_manifest(4), log);
  const auto state = reopened.state();
  ASSERT_EQ(state.size(), 2U);
  EXPECT_EQ(state.at("2-3").author, "bob");
  EXPECT_EQ(reopened.get_pair("2-3")->annotation->status, Status::kAccepted);
  EXPECT_FALSE(reopened.get_pair("1-2")->annotation.has_value());
  EXPECT_FALSE(reopened.get_pair("nope").has_value());
}

TEST(CurationStore, LogReferencingUnknownPairIsInconsistent) {
  TempDir dir;
  const auto log = dir / "log.jsonl";
  {
    CurationStore store(chain_pairs(6), small_manifest(6), log);
    store.put_annotation("4-5", make_annotation("4-5", Status::kDraft));
  }
  EXPECT_EQ(kind_of([&] { CurationStore store(chain_pairs(3), small_manifest(6), log); }),
            ErrorKind::kConsistency);
}

TEST(CurationStore, ExportsOnlyAcceptedInPairOrder) {
  TempDir dir;
  CurationStore store(chain_pairs(6), small_manifest(6), dir / "log.jsonl");
  EXPECT_EQ(kind_of([&] { store.export_benchmark(); }), ErrorKind::kValidation);
  store.put_annotation("3-4", make_annotation("3-4", Status::kAccepted, "a", 1));
  store.put_annotation("0-1", make_annotation("0-1", Status::kAccepted, "a", 2));
  store.put_annotation("1-2", make_annotation("1-2", Status::kDraft, "a", 3));
  store.put_annotation("2-3", make_annotation("2-3", Status::kAccepted, "a", 4));
  store.put_annotation("2-3", make_annotation("2-3", Status::kRejected, "a", 4));
  const auto doc = store.export_benchmark();
  ASSERT_EQ(doc.pairs.size(), 2U);
  EXPECT_EQ(doc.pairs[0].pair_id, "0-1");
  EXPECT_EQ(doc.pairs[1].pair_id, "3-4");
  EXPECT_EQ(doc.pairs[1].images[1], "img4");
  EXPECT_EQ(doc.pairs[0].questions[1].question_id, "0-1-q1");
  EXPECT_EQ(doc.pairs[0].patterns, std::vector<bench::Pattern>{bench::kPatterns[2]});

  const auto text = bench::dump_benchmark(doc);
  EXPECT_EQ(bench::dump_benchmark(bench::parse_benchmark(text)), text);
}

}  // namespace
}  // namespace blindpair::curation
