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

#include <fstream>
#include <random>
#include <sstream>

#include "bench_fixtures.hpp"
#include "blindpair/bench_io.hpp"
#include "blindpair/error.hpp"
#include "test_util.hpp"

namespace blindpair::bench {
namespace {

using testing::cycled_benchmark;
using testing::oracle_responses;
using testing::random_benchmark;

ErrorKind kind_of(auto fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

TEST(BenchmarkFile, RoundTripIsByteIdentical) {
  Benchmark b;
  b.pairs = random_benchmark(30, 1);
  b.pairs[3].questions[1].notation = Notation::kNumbers;
  b.pairs[4].questions[0].text = "Quote \" and unicode é survive?";
  const auto text = dump_benchmark(b);
  const auto parsed = parse_benchmark(text);
  EXPECT_EQ(parsed, b);
  EXPECT_EQ(dump_benchmark(parsed), text);
  EXPECT_EQ(text.back(), '\n');
}

TEST(BenchmarkFile, KeyOrderIsFixed) {
  Benchmark b;
  b.pairs = random_benchmark(1, 2);
  const auto doc = to_json(b);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc["pairs"][0].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"pair_id", "images", "questions", "patterns"}));
  keys.clear();
  for (const auto& [k, v] : doc["pairs"][0]["questions"][0].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"question_id", "text", "options", "correct_index", "notation"}));
}

TEST(BenchmarkFile, RejectsMalformedDocuments) {
  Benchmark b;
  b.pairs = random_benchmark(2, 3);
  auto doc = nlohmann::json::parse(dump_benchmark(b));
  auto bad = doc;
  bad["version"] = 2;
  EXPECT_EQ(kind_of([&] { benchmark_from_json(bad); }), ErrorKind::kFormat);
  bad = doc;
  bad["pairs"][0]["patterns"] = {"not_a_pattern"};
  EXPECT_EQ(kind_of([&] { benchmark_from_json(bad); }), ErrorKind::kFormat);
  bad = doc;
  bad["pairs"][1]["pair_id"] = doc["pairs"][0]["pair_id"];
  EXPECT_EQ(kind_of([&] { benchmark_from_json(bad); }), ErrorKind::kValidation);
  bad = doc;
  bad["pairs"][0]["questions"].erase(1);
  EXPECT_EQ(kind_of([&] { benchmark_from_json(bad); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { parse_benchmark("{not json"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { load_benchmark("/nonexistent/bench.json"); }), ErrorKind::kIo);
}

TEST(Responses, NullAndNegativeAreAbstentions) {
  const auto r = responses_from_json(
      nlohmann::json::parse(R"({"model_id": "m", "answers": {"a": 1, "b": null, "c": -1}})"));
  EXPECT_EQ(r.model_id, "m");
  EXPECT_EQ(r.answers.at("a"), 1U);
  EXPECT_FALSE(r.answers.at("b").has_value());
  EXPECT_FALSE(r.answers.at("c").has_value());
  const auto again = responses_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(again.answers, r.answers);
  EXPECT_EQ(kind_of([] { responses_from_json(nlohmann::json::parse(R"({"answers": {}})")); }),
            ErrorKind::kFormat);
}

TEST(VlmSims, ParsesLines) {
  std::istringstream in(
      "{\"pair_id\": \"x\", \"sims\": [[0.9, 0.1], [0.2, 0.8]], \"pattern\": \"text\"}\n"
      "\n"
      "{\"pair_id\": \"y\", \"sims\": [[0.1, 0.2], [0.3, 0.4]]}\n");
  const auto rows = read_vlm_sims(in);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_EQ(rows[0].pattern, Pattern::kText);
  EXPECT_DOUBLE_EQ(rows[0].sims[1][0], 0.2);
  EXPECT_FALSE(rows[1].pattern.has_value());
  std::istringstream bad("{\"pair_id\": \"x\", \"sims\": [[0.9, 0.1]]}\n");
  EXPECT_EQ(kind_of([&] { read_vlm_sims(bad); }), ErrorKind::kFormat);
}

TEST(Reports, RoundedToOneDecimal) {
  EXPECT_DOUBLE_EQ(round1(19.2592), 19.3);
  EXPECT_DOUBLE_EQ(round1(13.3333), 13.3);
  const auto pairs = cycled_benchmark(27, 4);
  auto r = oracle_responses(pairs);
  r.model_id = "oracle";
  r.answers[pairs[0].questions[0].question_id] = 1 - pairs[0].questions[0].correct_index;
  const auto report = score_mmvp(pairs, r);
  const auto doc = to_json(report);
  EXPECT_DOUBLE_EQ(doc["per_pattern"]["orientation_direction"]["accuracy"].get<double>(), 66.7);
  EXPECT_DOUBLE_EQ(doc["overall_pair_accuracy"].get<double>(), 96.3);
  EXPECT_TRUE(doc["in1k_zeroshot"].is_null());
}

TEST(Reports, CsvShape) {
  const auto pairs = cycled_benchmark(9, 5);
  auto a = oracle_responses(pairs);
  a.model_id = "model,a";
  auto b = a;
  b.model_id = "b";
  for (auto& [qid, ans] : b.answers) ans = std::nullopt;
  const std::vector<ScoreReport> reports{score_mmvp(pairs, a), score_mmvp(pairs, b)};
  std::ostringstream out;
  write_pattern_csv(out, reports);
  std::istringstream lines(out.str());
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  ASSERT_EQ(rows.size(), 12U);
  EXPECT_EQ(rows[0], "pattern,\"model,a\",b");
  EXPECT_EQ(rows[1], "orientation_direction,100.0,0.0");
  EXPECT_EQ(rows[10], "mmvp_average,100.0,0.0");
}

}  // namespace
}  // namespace blindpair::bench
