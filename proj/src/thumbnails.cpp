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
#include "blindpair/thumbnails.hpp"

#include <algorithm>
#include <cstdio>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <span>
#include <system_error>
#include <thread>

#include "blindpair/checksum.hpp"
#include "blindpair/error.hpp"

namespace blindpair::curation {

ThumbnailCache::ThumbnailCache(std::filesystem::path dir, int max_edge)
    : dir_(std::move(dir)), max_edge_(max_edge) {}

std::filesystem::path ThumbnailCache::get(const std::string& image_id,
                                          const std::filesystem::path& source) {
  char name[32];
  const auto key = xxh64(std::as_bytes(std::span<const char>(image_id.data(), image_id.size())));
  std::snprintf(name, sizeof(name), "%016llx.jpg", static_cast<unsigned long long>(key));
  const auto target = dir_ / name;
  std::error_code ec;
  if (std::filesystem::exists(target, ec)) return target;

  const cv::Mat image = cv::imread(source.string(), cv::IMREAD_COLOR);
  if (image.empty()) throw Error(ErrorKind::kData, "cannot decode image " + source.string());
  cv::Mat thumb = image;
  const int edge = std::max(image.cols, image.rows);
  if (edge > max_edge_) {
    const double scale = static_cast<double>(max_edge_) / edge;
    cv::resize(image, thumb, cv::Size(), scale, scale, cv::INTER_AREA);
  }
  std::filesystem::create_directories(dir_, ec);
  // Concurrent requests may race; rename makes the last writer win atomically.
  // The encoder is picked from the extension, so keep ".jpg" last.
  auto tmp = target;
  tmp.replace_extension(".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + ".jpg");
  if (!cv::imwrite(tmp.string(), thumb)) {
    throw Error(ErrorKind::kIo, "cannot write thumbnail " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
  return target;
}

}  // namespace blindpair::curation
