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
#include "blindpair/bench.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "blindpair/error.hpp"

namespace blindpair::bench {
namespace {

struct PatternNames {
  std::string_view id;
  std::string_view display;
};

constexpr std::array<PatternNames, kPatternCount> kNames = {{
    {"orientation_direction", "Orientation and Direction"},
    {"presence_of_features", "Presence of Specific Features"},
    {"state_condition", "State and Condition"},
    {"quantity_count", "Quantity and Count"},
    {"positional_relational", "Positional and Relational Context"},
    {"color_appearance", "Color and Appearance"},
    {"structural_physical", "Structural and Physical Characteristics"},
    {"text", "Texts"},
    {"viewpoint_perspective", "Viewpoint and Perspective"},
}};

Error invalid(const std::string& what) { return Error(ErrorKind::kValidation, what); }

void validate_question(const Question& q, const std::string& where) {
  if (q.question_id.empty()) throw invalid(where + ": question_id is empty");
  if (q.options.size() < 2) throw invalid(where + ": needs at least 2 options");
  if (q.correct_index >= q.options.size()) {
    throw invalid(where + ": correct_index " + std::to_string(q.correct_index) + " out of range for " +
                  std::to_string(q.options.size()) + " options");
  }
}

void validate_pair(const BenchmarkPair& p) {
  const std::string where = "pair '" + p.pair_id + "'";
  if (p.pair_id.empty()) throw invalid("pair_id is empty");
  for (const auto& img : p.images) {
    if (img.empty()) throw invalid(where + ": image reference is empty");
  }
  for (std::size_t k = 0; k < 2; ++k) {
    validate_question(p.questions[k], where + " question " + std::to_string(k));
  }
  if (p.patterns.empty()) throw invalid(where + ": needs at least one pattern");
  std::set<Pattern> seen(p.patterns.begin(), p.patterns.end());
  if (seen.size() != p.patterns.size()) throw invalid(where + ": repeated pattern label");
}

double percent(std::size_t correct, std::size_t total) {
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

void finalize(std::array<PatternScore, kPatternCount>& scores, std::optional<double>& average) {
  bool complete = true;
  std::array<double, kPatternCount> acc{};
  for (std::size_t k = 0; k < kPatternCount; ++k) {
    auto& s = scores[k];
    if (s.pairs_total == 0) {
      complete = false;
      continue;
    }
    s.accuracy = percent(s.pairs_correct, s.pairs_total);
    acc[k] = *s.accuracy;
  }
  if (complete) average = mean_of_patterns(acc);
}

}  // namespace

std::string_view to_string(Pattern p) { return kNames.at(index_of(p)).id; }

std::string_view display_name(Pattern p) { return kNames.at(index_of(p)).display; }

std::optional<Pattern> parse_pattern(std::string_view name) {
  for (std::size_t k = 0; k < kPatternCount; ++k) {
    if (kNames[k].id == name) return kPatterns[k];
  }
  return std::nullopt;
}

std::string_view to_string(Notation n) { return n == Notation::kLetters ? "letters" : "numbers"; }

Notation parse_notation(std::string_view name) {
  if (name == "letters") return Notation::kLetters;
  if (name == "numbers") return Notation::kNumbers;
  throw invalid("unknown notation scheme '" + std::string(name) + "' (expected letters|numbers)");
}

std::string option_label(Notation n, std::size_t index) {
  if (n == Notation::kNumbers) return "(" + std::to_string(index + 1) + ")";
  // a..z, then aa, ab, ... for very long option lists
  std::string letters;
  std::size_t k = index + 1;
  while (k > 0) {
    --k;
    letters.insert(letters.begin(), static_cast<char>('a' + k % 26));
    k /= 26;
  }
  return "(" + letters + ")";
}

std::string render(const Question& q) {
  std::string out = q.text;
  for (std::size_t k = 0; k < q.options.size(); ++k) {
    out += ' ';
    out += option_label(q.notation, k);
    out += ' ';
    out += q.options[k];
  }
  return out;
}

void validate(std::span<const BenchmarkPair> pairs) {
  std::unordered_set<std::string> question_ids;
  std::unordered_set<std::string> pair_ids;
  for (const auto& p : pairs) {
    validate_pair(p);
    if (!pair_ids.insert(p.pair_id).second) throw invalid("duplicate pair_id '" + p.pair_id + "'");
    for (const auto& q : p.questions) {
      if (!question_ids.insert(q.question_id).second) {
        throw invalid("duplicate question_id '" + q.question_id + "'");
      }
    }
  }
}

ScoreReport score_mmvp(std::span<const BenchmarkPair> pairs, const ResponseSet& responses) {
  if (pairs.empty()) throw invalid("cannot score an empty benchmark");
  validate(pairs);

  ScoreReport report;
  report.model_id = responses.model_id;
  report.pairs_total = pairs.size();
  std::size_t questions_correct = 0;

  for (const auto& p : pairs) {
    bool both = true;
    for (const auto& q : p.questions) {
      bool right = false;
      if (auto it = responses.answers.find(q.question_id); it != responses.answers.end() && it->second) {
        const std::size_t chosen = *it->second;
        if (chosen >= q.options.size()) {
          throw invalid("answer " + std::to_string(chosen) + " to '" + q.question_id +
                        "' is out of range for " + std::to_string(q.options.size()) + " options");
        }
        right = chosen == q.correct_index;
      }
      questions_correct += right ? 1 : 0;
      both = both && right;
    }
    report.pairs_correct += both ? 1 : 0;
    for (Pattern pat : p.patterns) {
      auto& s = report.per_pattern[index_of(pat)];
      ++s.pairs_total;
      s.pairs_correct += both ? 1 : 0;
    }
    auto& primary = report.per_pattern_primary[index_of(p.patterns.front())];
    ++primary.pairs_total;
    primary.pairs_correct += both ? 1 : 0;
  }

  report.overall_pair_accuracy = percent(report.pairs_correct, report.pairs_total);
  report.question_accuracy = percent(questions_correct, 2 * report.pairs_total);
  finalize(report.per_pattern, report.mmvp_average);
  finalize(report.per_pattern_primary, report.mmvp_average_primary);
  return report;
}

bool score_vlm_pair(const SimMatrix& s, MatchDirection direction) {
  if (direction == MatchDirection::kPerText) {
    return s[0][0] > s[1][0] && s[1][1] > s[0][1];
  }
  return s[0][0] > s[0][1] && s[1][1] > s[1][0];
}

VlmReport aggregate_vlm(const std::map<std::string, bool>& results,
                        const std::map<std::string, Pattern>& pattern_of) {
  VlmReport report;
  for (const auto& [pair_id, correct] : results) {
    auto it = pattern_of.find(pair_id);
    if (it == pattern_of.end()) throw invalid("pair '" + pair_id + "' has no pattern");
    auto& s = report.per_pattern[index_of(it->second)];
    ++s.pairs_total;
    s.pairs_correct += correct ? 1 : 0;
    ++report.pairs_total;
    report.pairs_correct += correct ? 1 : 0;
  }
  std::array<double, kPatternCount> acc{};
  for (std::size_t k = 0; k < kPatternCount; ++k) {
    auto& s = report.per_pattern[k];
    if (s.pairs_total == 0) {
      throw invalid("pattern '" + std::string(to_string(kPatterns[k])) + "' has no pairs");
    }
    s.accuracy = percent(s.pairs_correct, s.pairs_total);
    acc[k] = *s.accuracy;
  }
  report.average = mean_of_patterns(acc);
  return report;
}

double mean_of_patterns(std::span<const double, kPatternCount> accuracies) {
  double sum = 0.0;
  for (double a : accuracies) sum += a;
  return sum / static_cast<double>(kPatternCount);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw invalid("pearson needs equal-length inputs");
  if (x.size() < 2) throw invalid("pearson needs at least two points");
  // Welford-style running moments.
  double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double dx = x[k] - mean_x;
    const double dy = y[k] - mean_y;
    mean_x += dx / n;
    mean_y += dy / n;
    sxx += dx * (x[k] - mean_x);
    syy += dy * (y[k] - mean_y);
    sxy += dx * (y[k] - mean_y);
  }
  if (sxx == 0.0 || syy == 0.0) throw invalid("correlation is undefined for a constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

BenchmarkPair swap_options(const BenchmarkPair& p) {
  BenchmarkPair out = p;
  for (auto& q : out.questions) {
    if (q.options.size() != 2) {
      throw invalid("swap_options needs exactly 2 options, question '" + q.question_id + "' has " +
                    std::to_string(q.options.size()));
    }
    std::swap(q.options[0], q.options[1]);
    q.correct_index = 1 - q.correct_index;
  }
  return out;
}

ResponseSet swap_responses(const ResponseSet& responses, std::span<const BenchmarkPair> pairs) {
  std::unordered_map<std::string, std::size_t> option_count;
  for (const auto& p : pairs) {
    for (const auto& q : p.questions) option_count[q.question_id] = q.options.size();
  }
  ResponseSet out = responses;
  for (auto& [qid, answer] : out.answers) {
    auto it = option_count.find(qid);
    if (it == option_count.end() || !answer) continue;
    if (it->second != 2) throw invalid("question '" + qid + "' does not have exactly 2 options");
    if (*answer < 2) answer = 1 - *answer;
  }
  return out;
}

BenchmarkPair renotate(const BenchmarkPair& p, Notation scheme) {
  BenchmarkPair out = p;
  for (auto& q : out.questions) q.notation = scheme;
  return out;
}

}  // namespace blindpair::bench
