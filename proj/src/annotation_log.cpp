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
#include "blindpair/annotation_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "blindpair/error.hpp"

namespace blindpair::curation {
namespace {

Error invalid(const std::string& what) { return Error(ErrorKind::kValidation, what); }

bool valid_timestamp(const std::string& ts) {
  static const std::regex kPattern(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d{1,9})?Z$)");
  return std::regex_match(ts, kPattern);
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::kDraft: return "draft";
    case Status::kAccepted: return "accepted";
    case Status::kRejected: return "rejected";
  }
  return "draft";
}

Status parse_status(std::string_view name) {
  if (name == "draft") return Status::kDraft;
  if (name == "accepted") return Status::kAccepted;
  if (name == "rejected") return Status::kRejected;
  throw invalid("unknown annotation status '" + std::string(name) + "'");
}

void validate(const Annotation& a) {
  if (a.pair_id.empty()) throw invalid("annotation has no pair_id");
  if (a.questions.size() > 2) throw invalid("an annotation holds at most 2 questions");
  std::set<int> slots;
  for (const auto& q : a.questions) {
    const std::string where = "question for image slot " + std::to_string(q.image_slot);
    if (q.image_slot != 0 && q.image_slot != 1) throw invalid("image_slot must be 0 or 1");
    if (!slots.insert(q.image_slot).second) throw invalid(where + " appears twice");
    if (q.options.size() < 2) throw invalid(where + ": needs at least 2 options");
    for (const auto& o : q.options) {
      if (o.empty()) throw invalid(where + ": empty option");
    }
    if (q.correct_index >= q.options.size()) {
      throw invalid(where + ": correct_index " + std::to_string(q.correct_index) +
                    " out of range for " + std::to_string(q.options.size()) + " options");
    }
  }
  std::set<bench::Pattern> pats(a.patterns.begin(), a.patterns.end());
  if (pats.size() != a.patterns.size()) throw invalid("repeated pattern label");
  if (!a.created_at.empty() && !valid_timestamp(a.created_at)) {
    throw invalid("created_at must be a UTC timestamp like 2024-01-31T12:00:00Z");
  }
  if (a.status == Status::kAccepted) {
    if (a.questions.size() != 2) throw invalid("an accepted annotation needs one question per image");
    for (const auto& q : a.questions) {
      if (q.text.empty()) throw invalid("an accepted annotation cannot have an empty question");
    }
    if (a.patterns.empty()) throw invalid("an accepted annotation needs at least one pattern");
  }
}

nlohmann::ordered_json to_json(const Annotation& a) {
  nlohmann::ordered_json j;
  j["seq"] = a.seq;
  j["pair_id"] = a.pair_id;
  j["author"] = a.author;
  j["created_at"] = a.created_at;
  j["status"] = std::string(to_string(a.status));
  auto& pats = j["patterns"] = nlohmann::ordered_json::array();
  for (auto p : a.patterns) pats.push_back(std::string(bench::to_string(p)));
  auto& qs = j["questions"] = nlohmann::ordered_json::array();
  for (const auto& q : a.questions) {
    nlohmann::ordered_json qj;
    qj["image_slot"] = q.image_slot;
    qj["text"] = q.text;
    qj["options"] = q.options;
    qj["correct_index"] = q.correct_index;
    qs.push_back(std::move(qj));
  }
  return j;
}

Annotation annotation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw invalid("annotation must be an object");
  Annotation a;
  try {
    a.seq = j.value("seq", std::uint64_t{0});
    a.pair_id = j.value("pair_id", std::string{});
    a.author = j.value("author", std::string{});
    a.created_at = j.value("created_at", std::string{});
    a.status = parse_status(j.value("status", std::string{"draft"}));
    if (auto it = j.find("patterns"); it != j.end()) {
      if (!it->is_array()) throw invalid("'patterns' must be an array");
      for (const auto& name : *it) {
        auto p = name.is_string() ? bench::parse_pattern(name.get<std::string>()) : std::nullopt;
        if (!p) throw invalid("unknown pattern " + name.dump());
        a.patterns.push_back(*p);
      }
    }
    if (auto it = j.find("questions"); it != j.end()) {
      if (!it->is_array()) throw invalid("'questions' must be an array");
      for (const auto& qj : *it) {
        if (!qj.is_object()) throw invalid("question must be an object");
        AnnotatedQuestion q;
        q.image_slot = qj.at("image_slot").get<int>();
        q.text = qj.value("text", std::string{});
        if (!qj.contains("options")) throw invalid("question is missing its options");
        q.options = qj.at("options").get<std::vector<std::string>>();
        if (!qj.contains("correct_index")) throw invalid("question is missing correct_index");
        const auto idx = qj.at("correct_index").get<std::int64_t>();
        if (idx < 0) throw invalid("correct_index must be non-negative");
        q.correct_index = static_cast<std::size_t>(idx);
        a.questions.push_back(std::move(q));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw invalid(std::string("malformed annotation: ") + e.what());
  }
  return a;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AnnotationLog::AnnotationLog(std::filesystem::path path) : path_(std::move(path)) {
  replay();
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorKind::kIo, "cannot open annotation log " + path_.string() + ": " +
                                    std::strerror(errno));
  }
}

AnnotationLog::~AnnotationLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AnnotationLog::replay() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // a missing log is an empty log
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string content = ss.str();

  std::size_t pos = 0;
  std::size_t good_end = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = content.substr(pos, complete ? nl - pos : std::string::npos);
    ++line_no;
    Annotation a;
    try {
      a = annotation_from_json(nlohmann::json::parse(line));
      validate(a);
    } catch (const std::exception& e) {
      if (!complete) break;  // torn tail from an interrupted append
      throw Error(ErrorKind::kFormat, path_.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (a.seq <= last_seq()) {
      throw Error(ErrorKind::kFormat, path_.string() + " line " + std::to_string(line_no) +
                                          ": sequence numbers must strictly increase");
    }
    latest_[a.pair_id] = records_.size();
    records_.push_back(std::move(a));
    pos = complete ? nl + 1 : content.size();
    good_end = pos;
  }
  if (good_end < content.size() || (!content.empty() && content.back() != '\n')) {
    in.close();
    std::filesystem::resize_file(path_, good_end);
    if (good_end > 0 && content[good_end - 1] != '\n') {
      // A complete record without its newline: restore the terminator.
      std::ofstream fix(path_, std::ios::binary | std::ios::app);
      fix << '\n';
    }
  }
}

const Annotation& AnnotationLog::append(Annotation a) {
  a.seq = last_seq() + 1;
  if (a.created_at.empty()) a.created_at = utc_now();
  validate(a);
  const std::string line = to_json(a).dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorKind::kIo, "annotation log write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) {
    throw Error(ErrorKind::kIo, "annotation log fsync failed: " + std::string(std::strerror(errno)));
  }
  latest_[a.pair_id] = records_.size();
  records_.push_back(std::move(a));
  return records_.back();
}

const Annotation* AnnotationLog::latest(const std::string& pair_id) const {
  auto it = latest_.find(pair_id);
  return it == latest_.end() ? nullptr : &records_[it->second];
}

}  // namespace blindpair::curation
