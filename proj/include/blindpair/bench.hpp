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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blindpair::bench {

// The nine visual patterns, in benchmark table column order.
enum class Pattern : std::uint8_t {
  kOrientationDirection,
  kPresenceOfFeatures,
  kStateCondition,
  kQuantityCount,
  kPositionalRelational,
  kColorAppearance,
  kStructuralPhysical,
  kText,
  kViewpointPerspective,
};

inline constexpr std::size_t kPatternCount = 9;
inline constexpr std::array<Pattern, kPatternCount> kPatterns = {
    Pattern::kOrientationDirection, Pattern::kPresenceOfFeatures,  Pattern::kStateCondition,
    Pattern::kQuantityCount,        Pattern::kPositionalRelational, Pattern::kColorAppearance,
    Pattern::kStructuralPhysical,   Pattern::kText,                 Pattern::kViewpointPerspective,
};

inline std::size_t index_of(Pattern p) { return static_cast<std::size_t>(p); }
std::string_view to_string(Pattern p);     // snake_case file name, e.g. "quantity_count"
std::string_view display_name(Pattern p);  // e.g. "Quantity and Count"
std::optional<Pattern> parse_pattern(std::string_view name);

// How option labels are rendered: "(a) Closed" or "(1) Closed".
enum class Notation { kLetters, kNumbers };

std::string_view to_string(Notation n);
Notation parse_notation(std::string_view name);  // throws kValidation
std::string option_label(Notation n, std::size_t index);

struct Question {
  std::string question_id;
  std::string text;
  std::vector<std::string> options;
  std::size_t correct_index = 0;
  Notation notation = Notation::kLetters;

  bool operator==(const Question&) const = default;
};

// "Is the door open or closed? (a) Open (b) Closed"
std::string render(const Question& q);

// questions[k] asks about images[k].
struct BenchmarkPair {
  std::string pair_id;
  std::array<std::string, 2> images;
  std::array<Question, 2> questions;
  std::vector<Pattern> patterns;

  bool operator==(const BenchmarkPair&) const = default;
};

struct Benchmark {
  int version = 1;
  std::vector<BenchmarkPair> pairs;

  bool operator==(const Benchmark&) const = default;
};

// Checks per-pair invariants and question_id uniqueness across the pairs.
void validate(std::span<const BenchmarkPair> pairs);

struct ResponseSet {
  std::string model_id;
  // nullopt means the model abstained; abstentions and missing ids score as wrong.
  std::map<std::string, std::optional<std::size_t>> answers;
};

struct PatternScore {
  std::size_t pairs_total = 0;
  std::size_t pairs_correct = 0;
  std::optional<double> accuracy;  // percent; empty when the pattern has no pairs
};

struct ScoreReport {
  std::string model_id;
  std::size_t pairs_total = 0;
  std::size_t pairs_correct = 0;
  double overall_pair_accuracy = 0.0;
  double question_accuracy = 0.0;
  // Multi-label binning: a pair counts toward every pattern it carries.
  std::array<PatternScore, kPatternCount> per_pattern{};
  std::optional<double> mmvp_average;  // set only when all nine patterns have pairs
  // Single-label binning: a pair counts toward its first listed pattern only.
  std::array<PatternScore, kPatternCount> per_pattern_primary{};
  std::optional<double> mmvp_average_primary;
  // Externally supplied zero-shot ImageNet accuracy, if any.
  std::optional<double> in1k_zeroshot;
};

// A pair scores only if both of its questions are answered correctly.
ScoreReport score_mmvp(std::span<const BenchmarkPair> pairs, const ResponseSet& responses);

// sims[img][txt]: similarity of image img to text txt; (k, k) is the true match.
using SimMatrix = std::array<std::array<double, 2>, 2>;

struct VlmPairSims {
  std::string pair_id;
  SimMatrix sims{};
  std::optional<Pattern> pattern;
};

enum class MatchDirection {
  kPerText,   // for each text, the correct image must be the strict argmax
  kPerImage,  // for each image, the correct text must be the strict argmax
};

bool score_vlm_pair(const SimMatrix& sims, MatchDirection direction = MatchDirection::kPerText);

struct VlmReport {
  std::size_t pairs_total = 0;
  std::size_t pairs_correct = 0;
  std::array<PatternScore, kPatternCount> per_pattern{};
  double average = 0.0;  // mean of the nine per-pattern accuracies
};

// Every pair in results needs an entry in pattern_of, and every pattern
// needs at least one pair.
VlmReport aggregate_vlm(const std::map<std::string, bool>& results,
                        const std::map<std::string, Pattern>& pattern_of);

double mean_of_patterns(std::span<const double, kPatternCount> accuracies);

// Sample Pearson correlation. Throws kValidation on length mismatch, fewer
// than two points, or a constant input.
double pearson(std::span<const double> x, std::span<const double> y);

// Reverses both questions' two options and remaps the answer key.
BenchmarkPair swap_options(const BenchmarkPair& p);

// Remaps a response set so that it picks the same option texts after
// swap_options has been applied to the benchmark.
ResponseSet swap_responses(const ResponseSet& responses, std::span<const BenchmarkPair> pairs);

// Changes only the label rendering of both questions.
BenchmarkPair renotate(const BenchmarkPair& p, Notation scheme);

}  // namespace blindpair::bench
