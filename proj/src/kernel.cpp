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
#include "blindpair/kernel.hpp"

#include <cmath>

namespace blindpair {
namespace {

inline float reduce_lanes(float* acc) {
  for (std::size_t width = kDotLanes / 2; width >= 1; width /= 2) {
    for (std::size_t k = 0; k < width; ++k) acc[k] += acc[k + width];
  }
  return acc[0];
}

inline float dot_impl(const float* a, const float* b, std::size_t dim) {
  alignas(64) float acc[kDotLanes] = {};
  std::size_t e = 0;
  for (; e + kDotLanes <= dim; e += kDotLanes) {
    for (std::size_t k = 0; k < kDotLanes; ++k) {
      acc[k] = std::fma(a[e + k], b[e + k], acc[k]);
    }
  }
  for (std::size_t k = 0; e + k < dim; ++k) {
    acc[k] = std::fma(a[e + k], b[e + k], acc[k]);
  }
  return reduce_lanes(acc);
}

// 4x4 block: four queries against four rows. Same per-pair lane sequence.
inline void dot4x4_impl(const float* const* q, const float* const* r,
                        std::size_t dim, float* out, std::size_t out_stride) {
  alignas(64) float acc[4][4][kDotLanes] = {};
  std::size_t e = 0;
  for (; e + kDotLanes <= dim; e += kDotLanes) {
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        for (std::size_t k = 0; k < kDotLanes; ++k) {
          acc[a][b][k] = std::fma(q[a][e + k], r[b][e + k], acc[a][b][k]);
        }
      }
    }
  }
  for (std::size_t k = 0; e + k < dim; ++k) {
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        acc[a][b][k] = std::fma(q[a][e + k], r[b][e + k], acc[a][b][k]);
      }
    }
  }
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = 0; b < 4; ++b) out[a * out_stride + b] = reduce_lanes(acc[a][b]);
  }
}

}  // namespace

float dot(std::span<const float> a, std::span<const float> b) {
  return dot_impl(a.data(), b.data(), a.size());
}

void dot_block(const float* queries, std::size_t query_count, std::size_t query_stride,
               const float* rows, std::size_t row_count, std::size_t row_stride,
               std::size_t len, float* out) {
  std::size_t a = 0;
  for (; a + 4 <= query_count; a += 4) {
    const float* q[4] = {queries + a * query_stride, queries + (a + 1) * query_stride,
                         queries + (a + 2) * query_stride, queries + (a + 3) * query_stride};
    std::size_t b = 0;
    for (; b + 4 <= row_count; b += 4) {
      const float* r[4] = {rows + b * row_stride, rows + (b + 1) * row_stride,
                           rows + (b + 2) * row_stride, rows + (b + 3) * row_stride};
      dot4x4_impl(q, r, len, out + a * row_count + b, row_count);
    }
    for (; b < row_count; ++b) {
      for (std::size_t t = 0; t < 4; ++t) {
        out[(a + t) * row_count + b] = dot_impl(q[t], rows + b * row_stride, len);
      }
    }
  }
  for (; a < query_count; ++a) {
    const float* q = queries + a * query_stride;
    for (std::size_t b = 0; b < row_count; ++b) {
      out[a * row_count + b] = dot_impl(q, rows + b * row_stride, len);
    }
  }
}

}  // namespace blindpair
