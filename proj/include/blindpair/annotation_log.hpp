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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "blindpair/bench.hpp"
#include "json.hpp"

namespace blindpair::curation {

enum class Status { kDraft, kAccepted, kRejected };

std::string_view to_string(Status s);
Status parse_status(std::string_view name);  // throws kValidation

struct AnnotatedQuestion {
  int image_slot = 0;  // 0 or 1
  std::string text;
  std::vector<std::string> options;
  std::size_t correct_index = 0;

  bool operator==(const AnnotatedQuestion&) const = default;
};

struct Annotation {
  std::uint64_t seq = 0;  // assigned by the log
  std::string pair_id;
  std::string author;
  std::string created_at;  // UTC, "YYYY-MM-DDTHH:MM:SSZ"
  std::vector<AnnotatedQuestion> questions;
  std::vector<bench::Pattern> patterns;
  Status status = Status::kDraft;

  bool operator==(const Annotation&) const = default;
};

// Shape checks that apply to every annotation; accepted annotations must
// also carry one question per image slot and at least one pattern.
void validate(const Annotation& a);

nlohmann::ordered_json to_json(const Annotation& a);
// Parses a record. `seq` and `created_at` are optional here; the log fills them.
Annotation annotation_from_json(const nlohmann::json& j);

std::string utc_now();

// Append-only, line-delimited annotation log. Opening replays the file;
// a torn final line (no trailing newline, unparseable) is cut off. Each
// append is fsync'ed before it returns. Latest record per pair wins.
class AnnotationLog {
 public:
  explicit AnnotationLog(std::filesystem::path path);
  ~AnnotationLog();
  AnnotationLog(const AnnotationLog&) = delete;
  AnnotationLog& operator=(const AnnotationLog&) = delete;

  // Assigns the next sequence number (and created_at when empty), makes the
  // record durable, then publishes it. Returns the stored record.
  const Annotation& append(Annotation a);

  const std::vector<Annotation>& records() const noexcept { return records_; }
  const std::map<std::string, std::size_t>& latest_index() const noexcept { return latest_; }
  const Annotation* latest(const std::string& pair_id) const;
  std::uint64_t last_seq() const noexcept { return records_.empty() ? 0 : records_.back().seq; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void replay();

  std::filesystem::path path_;
  int fd_ = -1;
  std::vector<Annotation> records_;
  std::map<std::string, std::size_t> latest_;  // pair_id -> index into records_
};

}  // namespace blindpair::curation
