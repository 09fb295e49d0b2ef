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

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blindpair/bench.hpp"
#include "json.hpp"

// File formats for the bench module. Documents are written with a fixed key
// order; the same document always serializes to the same bytes.
namespace blindpair::bench {

// {"version": 1, "pairs": [{"pair_id", "images": [a, b],
//   "questions": [{"question_id", "text", "options": [...],
//                  "correct_index", "notation"}, x2],
//   "patterns": ["orientation_direction", ...]}]}
nlohmann::ordered_json to_json(const Benchmark& b);
Benchmark benchmark_from_json(const nlohmann::json& doc);  // validates
std::string dump_benchmark(const Benchmark& b);
Benchmark parse_benchmark(std::string_view text);
Benchmark load_benchmark(const std::filesystem::path& path);

// {"model_id": "...", "answers": {"question_id": index | null}}. A null or
// negative index is an abstention.
ResponseSet responses_from_json(const nlohmann::json& doc);
nlohmann::ordered_json to_json(const ResponseSet& r);
ResponseSet load_responses(const std::filesystem::path& path);

// One {"pair_id", "sims": [[s00, s01], [s10, s11]], "pattern"?} per line.
std::vector<VlmPairSims> read_vlm_sims(std::istream& in);
std::vector<VlmPairSims> load_vlm_sims(const std::filesystem::path& path);

// Accuracies are rounded to one decimal place in exported documents.
double round1(double percent);
nlohmann::ordered_json to_json(const ScoreReport& r);
nlohmann::ordered_json to_json(const VlmReport& r, const std::string& model_id);

// Rows are patterns (plus the average), columns are models.
void write_pattern_csv(std::ostream& out, std::span<const ScoreReport> reports);
void write_pattern_csv(std::ostream& out, std::span<const VlmReport> reports,
                       std::span<const std::string> model_ids);
void write_text(std::ostream& out, const ScoreReport& r);

std::string read_file(const std::filesystem::path& path);

}  // namespace blindpair::bench
