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

#include <filesystem>
#include <fstream>

#include "blindpair/annotation_log.hpp"
#include "blindpair/error.hpp"
#include "curation_fixtures.hpp"
#include "test_util.hpp"

namespace blindpair::curation {
namespace {

using testing::make_annotation;
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

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(AnnotationLog, AssignsSequenceAndTimestamp) {
  TempDir dir;
  AnnotationLog log(dir / "log.jsonl");
  const auto& first = log.append(make_annotation("0-1", Status::kDraft));
  EXPECT_EQ(first.seq, 1U);
  EXPECT_EQ(first.created_at.size(), 20U);
  auto b = make_annotation("0-2", Status::kAccepted);
  b.created_at = "2026-01-02T03:04:05Z";
  EXPECT_EQ(log.append(b).created_at, "2026-01-02T03:04:05Z");
  EXPECT_EQ(log.last_seq(), 2U);
}

TEST(AnnotationLog, LatestWinsAndReplays) {
  TempDir dir;
  const auto path = dir / "log.jsonl";
  {
    AnnotationLog log(path);
    log.append(make_annotation("0-1", Status::kDraft, "alice", 0));
    log.append(make_annotation("1-2", Status::kDraft, "bob", 1));
    log.append(make_annotation("0-1", Status::kAccepted, "carol", 2));
    EXPECT_EQ(log.latest("0-1")->author, "carol");
    EXPECT_EQ(log.latest("0-1")->seq, 3U);
    EXPECT_EQ(log.latest("9-9"), nullptr);
  }
  AnnotationLog reopened(path);
  EXPECT_EQ(reopened.records().size(), 3U);
  EXPECT_EQ(reopened.latest("0-1")->author, "carol");
  EXPECT_EQ(reopened.latest("0-1")->status, Status::kAccepted);
  EXPECT_EQ(reopened.latest_index().size(), 2U);
  EXPECT_EQ(reopened.append(make_annotation("1-2", Status::kRejected)).seq, 4U);
}

TEST(AnnotationLog, RecordsRoundTripThroughJson) {
  auto a = make_annotation("3-7", Status::kAccepted, "dana \"d\"", 5);
  a.seq = 12;
  a.created_at = "2026-10-14T00:00:00Z";
  a.patterns.push_back(bench::Pattern::kText);
  EXPECT_EQ(annotation_from_json(nlohmann::json::parse(to_json(a).dump())), a);
}

TEST(AnnotationLog, TornTailIsTruncated) {
  TempDir dir;
  const auto path = dir / "log.jsonl";
  {
    AnnotationLog log(path);
    log.append(make_annotation("0-1", Status::kDraft));
    log.append(make_annotation("1-2", Status::kAccepted));
  }
  const auto intact = slurp(path);
  {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    out << R"({"seq": 3, "pair_id": "2-3", "auth)";
  }
  {
    AnnotationLog log(path);
    EXPECT_EQ(log.records().size(), 2U);
    EXPECT_EQ(slurp(path), intact);
    EXPECT_EQ(log.append(make_annotation("2-3", Status::kDraft)).seq, 3U);
  }
  AnnotationLog again(path);
  EXPECT_EQ(again.records().size(), 3U);
}

TEST(AnnotationLog, CorruptInteriorLineIsAnError) {
  TempDir dir;
  const auto path = dir / "log.jsonl";
  {
    std::ofstream out(path, std::ios::binary);
    out << "garbage\n";
  }
  EXPECT_EQ(kind_of([&] { AnnotationLog log(path); }), ErrorKind::kFormat);
}

TEST(AnnotationLog, SequenceMustIncrease) {
  TempDir dir;
  const auto path = dir / "log.jsonl";
  auto a = make_annotation("0-1", Status::kDraft);
  a.created_at = "2026-10-14T00:00:00Z";
  a.seq = 2;
  auto b = a;
  b.seq = 2;
  {
    std::ofstream out(path, std::ios::binary);
    out << to_json(a).dump() << "\n" << to_json(b).dump() << "\n";
  }
  EXPECT_EQ(kind_of([&] { AnnotationLog log(path); }), ErrorKind::kFormat);
}

TEST(Annotation, Validation) {
  EXPECT_NO_THROW(validate(make_annotation("0-1", Status::kAccepted)));
  auto a = make_annotation("0-1", Status::kAccepted);
  a.questions.pop_back();
  EXPECT_EQ(kind_of([&] { validate(a); }), ErrorKind::kValidation);
  a.status = Status::kDraft;
  EXPECT_NO_THROW(validate(a));  // drafts may be partial

  a = make_annotation("0-1", Status::kAccepted);
  a.patterns.clear();
  EXPECT_EQ(kind_of([&] { validate(a); }), ErrorKind::kValidation);
  a = make_annotation("0-1", Status::kDraft);
  a.questions[1].image_slot = 0;
  EXPECT_EQ(kind_of([&] { validate(a); }), ErrorKind::kValidation);
  a = make_annotation("0-1", Status::kDraft);
  a.questions[0].correct_index = 2;
  EXPECT_EQ(kind_of([&] { validate(a); }), ErrorKind::kValidation);
  a = make_annotation("0-1", Status::kDraft);
  a.questions[0].options = {"only"};
  EXPECT_EQ(kind_of([&] { validate(a); }), ErrorKind::kValidation);
  a = make_annotation("0-1", Status::kDraft);
  a.created_at = "yesterday";
  EXPECT_EQ(kind_of([&] { validate(a); }), ErrorKind::kValidation);
  EXPECT_EQ(kind_of([] { parse_status("maybe"); }), ErrorKind::kValidation);
}

}  // namespace
}  // namespace blindpair::curation
