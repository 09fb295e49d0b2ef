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

namespace blindpair {

// Number of interleaved partial sums in the dot-product reduction. Element k
// always lands in lane k % kDotLanes, lanes are combined by a fixed halving
// tree, and every multiply-add is an exactly rounded fma. Together these make
// the result a pure function of the two input rows: it does not depend on
// the argument order, on which kernel entry point computed it, or on how the
// compiler vectorized the loop.
inline constexpr std::size_t kDotLanes = 16;

// Requires a.size() == b.size().
float dot(std::span<const float> a, std::span<const float> b);

// out[a * row_count + b] = dot over the first `len` elements of query a and
// row b, where query a starts at queries + a * query_stride (likewise rows).
// With len equal to the row width each entry is bit-identical to dot().
void dot_block(const float* queries, std::size_t query_count, std::size_t query_stride,
               const float* rows, std::size_t row_count, std::size_t row_stride,
               std::size_t len, float* out);

}  // namespace blindpair
