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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace blindpair {

// Row-major n x d float32 matrix, one row per corpus image. Immutable once
// built; copies share the underlying buffer.
class EmbeddingMatrix {
 public:
  // Tolerance on row norms for a matrix flagged as normalized.
  static constexpr double kUnitNormTolerance = 1e-5;
  // Rows with an L2 norm below this cannot be normalized.
  static constexpr double kMinRowNorm = 1e-12;

  // Validates n >= 2, d >= 1, data.size() == n * d and that every element is
  // finite. The result is flagged as not normalized.
  static EmbeddingMatrix from_rows(std::size_t n, std::size_t d, std::vector<float> data);

  // As from_rows, but additionally checks every row norm is within
  // kUnitNormTolerance of 1 and flags the result as normalized.
  static EmbeddingMatrix from_unit_rows(std::size_t n, std::size_t d, std::vector<float> data);

  std::size_t rows() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool normalized() const noexcept { return normalized_; }

  std::span<const float> data() const noexcept { return {data_->data(), data_->size()}; }
  std::span<const float> row(std::size_t i) const;  // throws kOutOfRange

 private:
  EmbeddingMatrix(std::size_t n, std::size_t d, std::shared_ptr<const std::vector<float>> data,
                  bool normalized)
      : n_(n), d_(d), data_(std::move(data)), normalized_(normalized) {}

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::shared_ptr<const std::vector<float>> data_;
  bool normalized_ = false;
};

// Divides every row by its L2 norm (computed in double). Throws
// kDegenerateVector naming the first row whose norm is below kMinRowNorm.
EmbeddingMatrix normalize(const EmbeddingMatrix& m);

// Dot product of rows i and j of a normalized matrix, using the fixed-order
// kernel so cosine(m, i, j) and cosine(m, j, i) are bit-identical.
float cosine(const EmbeddingMatrix& m, std::size_t i, std::size_t j);

struct ManifestEntry {
  std::string image_id;
  std::string path;    // relative to the corpus root
  std::string source;  // corpus tag, e.g. "imagenet"
  std::optional<std::string> checksum;

  bool operator==(const ManifestEntry&) const = default;
};

// Ordered list of corpus images; entry k names row k of the paired matrix.
class CorpusManifest {
 public:
  CorpusManifest() = default;
  explicit CorpusManifest(std::vector<ManifestEntry> entries);  // throws on duplicate ids

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }
  const ManifestEntry& at(std::size_t row) const;
  std::optional<std::size_t> find(const std::string& image_id) const;

 private:
  std::vector<ManifestEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct EmbeddingStore {
  EmbeddingMatrix matrix;
  CorpusManifest manifest;
};

// Binary layout, all integers little-endian:
//   "EMB1" | u16 version = 1 | u8 dtype = 1 (f32) | u8 reserved = 0 |
//   u64 n | u32 d | n*d f32 row-major payload | u64 xxh64(payload, seed 0)
inline constexpr std::size_t kEmbeddingHeaderSize = 20;

EmbeddingMatrix read_embeddings(std::istream& in);
void write_embeddings(std::ostream& out, const EmbeddingMatrix& m);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m);

// One JSON object per line: {"image_id", "path", "source", "checksum"?}.
// Blank lines are skipped.
CorpusManifest read_manifest(std::istream& in);
void write_manifest(std::ostream& out, const CorpusManifest& manifest);
CorpusManifest load_manifest(const std::filesystem::path& path);

// Parses both streams and checks the manifest row count against the header.
// The returned matrix is not normalized.
EmbeddingStore ingest(std::istream& raw, std::istream& manifest);

}  // namespace blindpair
