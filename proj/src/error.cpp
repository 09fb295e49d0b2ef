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
#include "blindpair/error.hpp"

namespace blindpair {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kConsistency: return "consistency error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kDegenerateVector: return "degenerate-vector error";
    case ErrorKind::kOutOfRange: return "index out of range";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kNotFound: return "not found";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

}  // namespace blindpair
