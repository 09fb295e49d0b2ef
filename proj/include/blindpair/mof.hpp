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

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

// Mixture-of-features operators on abstract token grids. No networks live
// here: callers hand in whatever features their adapters produced.
namespace blindpair::mof {

enum class Source { kClip, kSsl };

std::string_view to_string(Source s);

// n = grid_h * grid_w tokens of width d, row-major over the grid.
class FeatureGrid {
 public:
  // Throws kShapeMismatch / kData when the invariants do not hold.
  FeatureGrid(std::size_t grid_h, std::size_t grid_w, std::size_t dim, std::vector<float> tokens,
              Source source);

  std::size_t grid_h() const noexcept { return grid_h_; }
  std::size_t grid_w() const noexcept { return grid_w_; }
  std::size_t tokens() const noexcept { return grid_h_ * grid_w_; }
  std::size_t dim() const noexcept { return dim_; }
  Source source() const noexcept { return source_; }
  std::span<const float> data() const noexcept { return values_; }
  std::span<const float> token(std::size_t k) const;

 private:
  std::size_t grid_h_;
  std::size_t grid_w_;
  std::size_t dim_;
  std::vector<float> values_;
  Source source_;
};

// Fraction of the vision-only (SSL) encoder in an additive blend; the CLIP
// share is 1 - ssl_ratio.
class MixRatio {
 public:
  explicit MixRatio(double ssl_ratio);  // throws kValidation outside [0, 1]
  double ssl() const noexcept { return ssl_; }
  double clip() const noexcept { return 1.0 - ssl_; }

 private:
  double ssl_;
};

// The SSL ratios of the additive sweep, in reporting order.
inline constexpr double kSslRatioGrid[] = {0.0, 0.25, 0.5, 0.625, 0.75, 0.875, 1.0};

// out = (1 - r) * clip + r * ssl per element, accumulated in double. The
// output is tagged kClip when r < 0.5, kSsl otherwise.
FeatureGrid additive_mof(const FeatureGrid& clip, const FeatureGrid& ssl, MixRatio r);

struct InterleavedSequence {
  std::size_t dim = 0;
  std::vector<float> tokens;        // 2n x dim
  std::vector<Source> provenance;   // clip at even positions, ssl at odd

  std::size_t size() const noexcept { return provenance.size(); }
};

// [clip_0, ssl_0, clip_1, ssl_1, ...] in row-major grid order. Both grids
// must have the same token count and width; grid shapes may differ.
InterleavedSequence interleave_mof(const FeatureGrid& clip, const FeatureGrid& ssl);

// Splits by provenance; returns the clip and ssl token buffers in order.
std::pair<std::vector<float>, std::vector<float>> split_by_source(const InterleavedSequence& seq);

// Patch tokens per encoder for a square image: (image_edge / patch_edge)^2.
std::size_t token_count(std::size_t image_edge, std::size_t patch_edge);

// Tokens seen by the language model after interleaving two such encoders.
inline std::size_t interleaved_token_count(std::size_t image_edge, std::size_t patch_edge) {
  return 2 * token_count(image_edge, patch_edge);
}

}  // namespace blindpair::mof
