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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "blindpair/embed_store.hpp"

namespace blindpair::testing {

// Gaussian rows scaled to unit length in double, then rounded to float.
inline std::vector<float> random_unit_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<float> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d);
    double sq = 0.0;
    for (auto& v : row) {
      v = g(rng);
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    for (std::size_t e = 0; e < d; ++e) out[i * d + e] = static_cast<float>(row[e] / norm);
  }
  return out;
}

inline EmbeddingMatrix random_unit_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  return EmbeddingMatrix::from_unit_rows(n, d, random_unit_rows(n, d, seed));
}

// Rows clustered around a few centers so both high and low similarities occur
// even in high dimension. Each row is center + noise * gaussian, normalized.
inline EmbeddingMatrix clustered_matrix(std::size_t n, std::size_t d, std::size_t centers,
                                        double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> pick(0, centers - 1);
  std::vector<std::vector<double>> c(centers, std::vector<double>(d));
  for (auto& row : c) {
    double sq = 0.0;
    for (auto& v : row) {
      v = g(rng);
      sq += v * v;
    }
    for (auto& v : row) v /= std::sqrt(sq);
  }
  std::vector<float> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& center = c[pick(rng)];
    std::vector<double> row(d);
    double sq = 0.0;
    for (std::size_t e = 0; e < d; ++e) {
      row[e] = center[e] + noise * g(rng) / std::sqrt(static_cast<double>(d));
      sq += row[e] * row[e];
    }
    for (std::size_t e = 0; e < d; ++e) out[i * d + e] = static_cast<float>(row[e] / std::sqrt(sq));
  }
  return EmbeddingMatrix::from_unit_rows(n, d, std::move(out));
}

// Removes the directory on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("blindpair-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace blindpair::testing
