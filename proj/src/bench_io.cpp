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
#include "blindpair/bench_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blindpair/error.hpp"

namespace blindpair::bench {
namespace {

Error format_error(const std::string& what) { return Error(ErrorKind::kFormat, what); }

template <typename Json>
const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw format_error(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw format_error(where + ": missing field '" + key + "'");
  return *it;
}

std::string string_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) throw format_error(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t index_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw format_error(where + ": '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

Question question_from_json(const nlohmann::json& j, const std::string& where) {
  Question q;
  q.question_id = string_field(j, "question_id", where);
  q.text = string_field(j, "text", where);
  const auto& opts = field(j, "options", where);
  if (!opts.is_array()) throw format_error(where + ": 'options' must be an array");
  for (const auto& o : opts) {
    if (!o.is_string()) throw format_error(where + ": options must be strings");
    q.options.push_back(o.get<std::string>());
  }
  q.correct_index = index_field(j, "correct_index", where);
  if (auto it = j.find("notation"); it != j.end()) {
    if (!it->is_string()) throw format_error(where + ": 'notation' must be a string");
    q.notation = parse_notation(it->get<std::string>());
  }
  return q;
}

nlohmann::ordered_json question_to_json(const Question& q) {
  nlohmann::ordered_json j;
  j["question_id"] = q.question_id;
  j["text"] = q.text;
  j["options"] = q.options;
  j["correct_index"] = q.correct_index;
  j["notation"] = std::string(to_string(q.notation));
  return j;
}

nlohmann::ordered_json pattern_scores_json(const std::array<PatternScore, kPatternCount>& scores) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (Pattern p : kPatterns) {
    const auto& s = scores[index_of(p)];
    nlohmann::ordered_json j;
    j["pairs_total"] = s.pairs_total;
    j["pairs_correct"] = s.pairs_correct;
    j["accuracy"] = s.accuracy ? nlohmann::ordered_json(round1(*s.accuracy)) : nullptr;
    out[std::string(to_string(p))] = std::move(j);
  }
  return out;
}

nlohmann::ordered_json optional_percent(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(round1(*v)) : nlohmann::ordered_json(nullptr);
}

std::string fmt1(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", round1(*v));
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::ordered_json to_json(const Benchmark& b) {
  nlohmann::ordered_json doc;
  doc["version"] = b.version;
  doc["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : b.pairs) {
    nlohmann::ordered_json j;
    j["pair_id"] = p.pair_id;
    j["images"] = {p.images[0], p.images[1]};
    j["questions"] = {question_to_json(p.questions[0]), question_to_json(p.questions[1])};
    auto& pats = j["patterns"] = nlohmann::ordered_json::array();
    for (Pattern pat : p.patterns) pats.push_back(std::string(to_string(pat)));
    doc["pairs"].push_back(std::move(j));
  }
  return doc;
}

Benchmark benchmark_from_json(const nlohmann::json& doc) {
  Benchmark b;
  const auto& version = field(doc, "version", "benchmark");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw format_error("benchmark: unsupported version");
  }
  const auto& pairs = field(doc, "pairs", "benchmark");
  if (!pairs.is_array()) throw format_error("benchmark: 'pairs' must be an array");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& j = pairs[k];
    const std::string where = "benchmark pair " + std::to_string(k);
    BenchmarkPair p;
    p.pair_id = string_field(j, "pair_id", where);
    const auto& images = field(j, "images", where);
    if (!images.is_array() || images.size() != 2) {
      throw format_error(where + ": 'images' must hold exactly 2 entries");
    }
    for (std::size_t s = 0; s < 2; ++s) {
      if (!images[s].is_string()) throw format_error(where + ": image refs must be strings");
      p.images[s] = images[s].get<std::string>();
    }
    const auto& questions = field(j, "questions", where);
    if (!questions.is_array() || questions.size() != 2) {
      throw format_error(where + ": 'questions' must hold exactly 2 entries");
    }
    for (std::size_t s = 0; s < 2; ++s) {
      p.questions[s] = question_from_json(questions[s], where + " question " + std::to_string(s));
    }
    const auto& pats = field(j, "patterns", where);
    if (!pats.is_array()) throw format_error(where + ": 'patterns' must be an array");
    for (const auto& name : pats) {
      auto parsed = name.is_string() ? parse_pattern(name.get<std::string>()) : std::nullopt;
      if (!parsed) throw format_error(where + ": unknown pattern " + name.dump());
      p.patterns.push_back(*parsed);
    }
    b.pairs.push_back(std::move(p));
  }
  validate(b.pairs);
  return b;
}

std::string dump_benchmark(const Benchmark& b) { return to_json(b).dump(2) + "\n"; }

Benchmark parse_benchmark(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(std::string("benchmark: ") + e.what());
  }
  return benchmark_from_json(doc);
}

Benchmark load_benchmark(const std::filesystem::path& path) { return parse_benchmark(read_file(path)); }

ResponseSet responses_from_json(const nlohmann::json& doc) {
  ResponseSet r;
  r.model_id = string_field(doc, "model_id", "responses");
  const auto& answers = field(doc, "answers", "responses");
  if (!answers.is_object()) throw format_error("responses: 'answers' must be an object");
  for (const auto& [qid, v] : answers.items()) {
    if (v.is_null()) {
      r.answers[qid] = std::nullopt;
    } else if (v.is_number_integer()) {
      const auto idx = v.get<std::int64_t>();
      r.answers[qid] = idx < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(idx));
    } else {
      throw format_error("responses: answer to '" + qid + "' must be an integer or null");
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const ResponseSet& r) {
  nlohmann::ordered_json doc;
  doc["model_id"] = r.model_id;
  auto& answers = doc["answers"] = nlohmann::ordered_json::object();
  for (const auto& [qid, a] : r.answers) {
    answers[qid] = a ? nlohmann::ordered_json(*a) : nlohmann::ordered_json(nullptr);
  }
  return doc;
}

ResponseSet load_responses(const std::filesystem::path& path) {
  try {
    return responses_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw format_error(path.string() + ": " + e.what());
  }
}

std::vector<VlmPairSims> read_vlm_sims(std::istream& in) {
  std::vector<VlmPairSims> out;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "sims line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw format_error(where + ": " + e.what());
    }
    VlmPairSims s;
    s.pair_id = string_field(j, "pair_id", where);
    const auto& sims = field(j, "sims", where);
    if (!sims.is_array() || sims.size() != 2) throw format_error(where + ": 'sims' must be 2x2");
    for (std::size_t r = 0; r < 2; ++r) {
      if (!sims[r].is_array() || sims[r].size() != 2) throw format_error(where + ": 'sims' must be 2x2");
      for (std::size_t c = 0; c < 2; ++c) {
        if (!sims[r][c].is_number()) throw format_error(where + ": similarities must be numbers");
        s.sims[r][c] = sims[r][c].get<double>();
        if (!std::isfinite(s.sims[r][c])) throw Error(ErrorKind::kData, where + ": non-finite similarity");
      }
    }
    if (auto it = j.find("pattern"); it != j.end() && !it->is_null()) {
      auto parsed = it->is_string() ? parse_pattern(it->get<std::string>()) : std::nullopt;
      if (!parsed) throw format_error(where + ": unknown pattern " + it->dump());
      s.pattern = parsed;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<VlmPairSims> load_vlm_sims(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_vlm_sims(in);
}

double round1(double percent) { return std::round(percent * 10.0) / 10.0; }

nlohmann::ordered_json to_json(const ScoreReport& r) {
  nlohmann::ordered_json j;
  j["model_id"] = r.model_id;
  j["pairs_total"] = r.pairs_total;
  j["pairs_correct"] = r.pairs_correct;
  j["overall_pair_accuracy"] = round1(r.overall_pair_accuracy);
  j["question_accuracy"] = round1(r.question_accuracy);
  j["per_pattern"] = pattern_scores_json(r.per_pattern);
  j["mmvp_average"] = optional_percent(r.mmvp_average);
  j["per_pattern_primary"] = pattern_scores_json(r.per_pattern_primary);
  j["mmvp_average_primary"] = optional_percent(r.mmvp_average_primary);
  j["in1k_zeroshot"] = optional_percent(r.in1k_zeroshot);
  return j;
}

nlohmann::ordered_json to_json(const VlmReport& r, const std::string& model_id) {
  nlohmann::ordered_json j;
  j["model_id"] = model_id;
  j["pairs_total"] = r.pairs_total;
  j["pairs_correct"] = r.pairs_correct;
  j["per_pattern"] = pattern_scores_json(r.per_pattern);
  j["mmvp_vlm_average"] = round1(r.average);
  return j;
}

void write_pattern_csv(std::ostream& out, std::span<const ScoreReport> reports) {
  out << "pattern";
  for (const auto& r : reports) out << ',' << csv_cell(r.model_id);
  out << '\n';
  for (Pattern p : kPatterns) {
    out << to_string(p);
    for (const auto& r : reports) out << ',' << fmt1(r.per_pattern[index_of(p)].accuracy);
    out << '\n';
  }
  out << "mmvp_average";
  for (const auto& r : reports) out << ',' << fmt1(r.mmvp_average);
  out << "\noverall_pair_accuracy";
  for (const auto& r : reports) out << ',' << fmt1(r.overall_pair_accuracy);
  out << '\n';
}

void write_pattern_csv(std::ostream& out, std::span<const VlmReport> reports,
                       std::span<const std::string> model_ids) {
  out << "pattern";
  for (const auto& id : model_ids) out << ',' << csv_cell(id);
  out << '\n';
  for (Pattern p : kPatterns) {
    out << to_string(p);
    for (const auto& r : reports) out << ',' << fmt1(r.per_pattern[index_of(p)].accuracy);
    out << '\n';
  }
  out << "mmvp_vlm_average";
  for (const auto& r : reports) out << ',' << fmt1(r.average);
  out << '\n';
}

void write_text(std::ostream& out, const ScoreReport& r) {
  out << "model " << r.model_id << ": " << r.pairs_correct << "/" << r.pairs_total
      << " pairs correct, pair accuracy " << fmt1(r.overall_pair_accuracy) << "%, question accuracy "
      << fmt1(r.question_accuracy) << "%\n";
  for (Pattern p : kPatterns) {
    const auto& s = r.per_pattern[index_of(p)];
    out << "  " << display_name(p) << ": ";
    if (s.accuracy) {
      out << fmt1(s.accuracy) << "% (" << s.pairs_correct << "/" << s.pairs_total << ")\n";
    } else {
      out << "no pairs\n";
    }
  }
  out << "  average over patterns: " << (r.mmvp_average ? fmt1(r.mmvp_average) : "n/a") << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace blindpair::bench
