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
#include <string>

namespace blindpair::curation {

// Downscales images so the longer edge is at most `max_edge` pixels and keeps
// the JPEG result on disk, keyed by image id.
class ThumbnailCache {
 public:
  ThumbnailCache(std::filesystem::path dir, int max_edge = 256);

  // Returns the cached thumbnail path, creating it on first use. Throws
  // kData when the source cannot be decoded.
  std::filesystem::path get(const std::string& image_id, const std::filesystem::path& source);

 private:
  std::filesystem::path dir_;
  int max_edge_;
};

}  // namespace blindpair::curation
