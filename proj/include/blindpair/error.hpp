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

#include <stdexcept>
#include <string>
#include <string_view>

namespace blindpair {

enum class ErrorKind {
  kFormat,          // malformed file header or document
  kConsistency,     // cross-file or cross-field disagreement
  kData,            // NaN/Inf or otherwise unusable values
  kDegenerateVector,
  kOutOfRange,
  kShapeMismatch,
  kValidation,      // a domain invariant was violated by the input
  kNotFound,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception. The kind lets callers
// (the CLI, the HTTP layer) map failures onto exit codes or status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// True for failures caused by bad input rather than by the environment.
inline bool is_validation_kind(ErrorKind kind) {
  return kind != ErrorKind::kIo;
}

}  // namespace blindpair
