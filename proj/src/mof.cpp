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
#include "blindpair/mof.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blindpair/error.hpp"

namespace blindpair::mof {

std::string_view to_string(Source s) { return s == Source::kClip ? "clip" : "ssl"; }

FeatureGrid::FeatureGrid(std::size_t grid_h, std::size_t grid_w, std::size_t dim,
                         std::vector<float> tokens, Source source)
    : grid_h_(grid_h), grid_w_(grid_w), dim_(dim), values_(std::move(tokens)), source_(source) {
  if (grid_h_ == 0 || grid_w_ == 0 || dim_ == 0) {
    throw Error(ErrorKind::kShapeMismatch, "feature grid needs at least one token of width >= 1");
  }
  if (values_.size() != grid_h_ * grid_w_ * dim_) {
    throw Error(ErrorKind::kShapeMismatch,
                "feature grid " + std::to_string(grid_h_) + "x" + std::to_string(grid_w_) + "x" +
                    std::to_string(dim_) + " does not match " + std::to_string(values_.size()) +
                    " values");
  }
  auto bad = std::find_if(values_.begin(), values_.end(), [](float v) { return !std::isfinite(v); });
  if (bad != values_.end()) {
    const auto k = static_cast<std::size_t>(bad - values_.begin());
    throw Error(ErrorKind::kData, "non-finite feature at token " + std::to_string(k / dim_));
  }
}

std::span<const float> FeatureGrid::token(std::size_t k) const {
  if (k >= tokens()) throw Error(ErrorKind::kOutOfRange, "token " + std::to_string(k) + " out of range");
  return std::span<const float>(values_).subspan(k * dim_, dim_);
}

MixRatio::MixRatio(double ssl_ratio) : ssl_(ssl_ratio) {
  if (!(ssl_ratio >= 0.0 && ssl_ratio <= 1.0)) {
    throw Error(ErrorKind::kValidation, "ssl ratio must lie in [0, 1]");
  }
}

FeatureGrid additive_mof(const FeatureGrid& clip, const FeatureGrid& ssl, MixRatio r) {
  if (clip.grid_h() != ssl.grid_h() || clip.grid_w() != ssl.grid_w() || clip.dim() != ssl.dim()) {
    throw Error(ErrorKind::kShapeMismatch, "additive mixing needs identical grid shapes");
  }
  const auto x = clip.data();
  const auto y = ssl.data();
  std::vector<float> out(x.size());
  const double wc = r.clip();
  const double ws = r.ssl();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = static_cast<float>(wc * x[k] + ws * y[k]);
  }
  return FeatureGrid(clip.grid_h(), clip.grid_w(), clip.dim(), std::move(out),
                     r.ssl() < 0.5 ? Source::kClip : Source::kSsl);
}

InterleavedSequence interleave_mof(const FeatureGrid& clip, const FeatureGrid& ssl) {
  if (clip.tokens() != ssl.tokens()) {
    throw Error(ErrorKind::kShapeMismatch, "token-count mismatch: " + std::to_string(clip.tokens()) +
                                               " clip tokens vs " + std::to_string(ssl.tokens()) +
                                               " ssl tokens");
  }
  if (clip.dim() != ssl.dim()) {
    throw Error(ErrorKind::kShapeMismatch, "width mismatch: " + std::to_string(clip.dim()) +
                                               " vs " + std::to_string(ssl.dim()));
  }
  const std::size_t n = clip.tokens();
  const std::size_t d = clip.dim();
  InterleavedSequence seq;
  seq.dim = d;
  seq.tokens.reserve(2 * n * d);
  seq.provenance.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto c = clip.token(k);
    const auto s = ssl.token(k);
    seq.tokens.insert(seq.tokens.end(), c.begin(), c.end());
    seq.provenance.push_back(Source::kClip);
    seq.tokens.insert(seq.tokens.end(), s.begin(), s.end());
    seq.provenance.push_back(Source::kSsl);
  }
  return seq;
}

std::pair<std::vector<float>, std::vector<float>> split_by_source(const InterleavedSequence& seq) {
  std::pair<std::vector<float>, std::vector<float>> parts;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    auto& dst = seq.provenance[k] == Source::kClip ? parts.first : parts.second;
    const auto begin = seq.tokens.begin() + static_cast<std::ptrdiff_t>(k * seq.dim);
    dst.insert(dst.end(), begin, begin + static_cast<std::ptrdiff_t>(seq.dim));
  }
  return parts;
}

std::size_t token_count(std::size_t image_edge, std::size_t patch_edge) {
  if (patch_edge == 0 || image_edge == 0 || image_edge % patch_edge != 0) {
    throw Error(ErrorKind::kValidation, "image edge " + std::to_string(image_edge) +
                                            " is not divisible by patch edge " +
                                            std::to_string(patch_edge));
  }
  const std::size_t per_side = image_edge / patch_edge;
  return per_side * per_side;
}

}  // namespace blindpair::mof
