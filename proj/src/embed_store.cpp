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
#include "blindpair/embed_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "blindpair/checksum.hpp"
#include "blindpair/error.hpp"
#include "blindpair/kernel.hpp"
#include "json.hpp"

namespace blindpair {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    bytes[k] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * k)) & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const unsigned char* bytes) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return static_cast<T>(v);
}

void check_shape(std::size_t n, std::size_t d, std::size_t size) {
  if (n < 2) throw Error(ErrorKind::kData, "embedding matrix needs at least 2 rows, got " + std::to_string(n));
  if (d < 1) throw Error(ErrorKind::kData, "embedding dimension must be at least 1");
  if (size / d != n || size % d != 0) {
    throw Error(ErrorKind::kShapeMismatch, "embedding buffer has " + std::to_string(size) +
                                               " floats, expected " + std::to_string(n) + " x " +
                                               std::to_string(d));
  }
}

void check_finite(std::size_t d, const std::vector<float>& data) {
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data[k])) {
      throw Error(ErrorKind::kData, "non-finite value at row " + std::to_string(k / d) +
                                        ", column " + std::to_string(k % d));
    }
  }
}

double row_norm(std::span<const float> row) {
  double sum = 0.0;
  for (float v : row) sum += static_cast<double>(v) * v;
  return std::sqrt(sum);
}

}  // namespace

EmbeddingMatrix EmbeddingMatrix::from_rows(std::size_t n, std::size_t d, std::vector<float> data) {
  check_shape(n, d, data.size());
  check_finite(d, data);
  return EmbeddingMatrix(n, d, std::make_shared<const std::vector<float>>(std::move(data)), false);
}

EmbeddingMatrix EmbeddingMatrix::from_unit_rows(std::size_t n, std::size_t d,
                                                std::vector<float> data) {
  check_shape(n, d, data.size());
  check_finite(d, data);
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = row_norm({data.data() + i * d, d});
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw Error(ErrorKind::kData, "row " + std::to_string(i) + " has norm " +
                                        std::to_string(norm) + ", expected unit length");
    }
  }
  return EmbeddingMatrix(n, d, std::make_shared<const std::vector<float>>(std::move(data)), true);
}

std::span<const float> EmbeddingMatrix::row(std::size_t i) const {
  if (i >= n_) {
    throw Error(ErrorKind::kOutOfRange,
                "row " + std::to_string(i) + " out of range for " + std::to_string(n_) + " rows");
  }
  return {data_->data() + i * d_, d_};
}

EmbeddingMatrix normalize(const EmbeddingMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t d = m.dim();
  std::vector<float> out(m.data().begin(), m.data().end());
  for (std::size_t i = 0; i < n; ++i) {
    std::span<float> row(out.data() + i * d, d);
    const double norm = row_norm(row);
    if (norm < EmbeddingMatrix::kMinRowNorm) {
      throw Error(ErrorKind::kDegenerateVector,
                  "row " + std::to_string(i) + " has near-zero norm and cannot be normalized");
    }
    for (float& v : row) v = static_cast<float>(v / norm);
  }
  return EmbeddingMatrix::from_unit_rows(n, d, std::move(out));
}

float cosine(const EmbeddingMatrix& m, std::size_t i, std::size_t j) {
  if (!m.normalized()) throw Error(ErrorKind::kValidation, "cosine requires a normalized matrix");
  return dot(m.row(i), m.row(j));
}

CorpusManifest::CorpusManifest(std::vector<ManifestEntry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (!index_.emplace(entries_[k].image_id, k).second) {
      throw Error(ErrorKind::kConsistency, "duplicate image_id '" + entries_[k].image_id +
                                               "' at manifest line " + std::to_string(k + 1));
    }
  }
}

const ManifestEntry& CorpusManifest::at(std::size_t row) const {
  if (row >= entries_.size()) {
    throw Error(ErrorKind::kOutOfRange, "manifest row " + std::to_string(row) + " out of range");
  }
  return entries_[row];
}

std::optional<std::size_t> CorpusManifest::find(const std::string& image_id) const {
  auto it = index_.find(image_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  unsigned char header[kEmbeddingHeaderSize];
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) {
    throw Error(ErrorKind::kFormat, "embedding file truncated inside the header");
  }
  if (std::memcmp(header, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::kFormat, "bad magic bytes, expected \"EMB1\"");
  }
  const auto version = get_le<std::uint16_t>(header + 4);
  const auto dtype = header[6];
  const auto reserved = header[7];
  const auto n = get_le<std::uint64_t>(header + 8);
  const auto d = get_le<std::uint32_t>(header + 16);
  if (version != kVersion) {
    throw Error(ErrorKind::kFormat, "unsupported version " + std::to_string(version));
  }
  if (dtype != kDtypeF32) throw Error(ErrorKind::kFormat, "unsupported dtype " + std::to_string(dtype));
  if (reserved != 0) throw Error(ErrorKind::kFormat, "reserved header byte must be zero");
  if (d == 0 || n > std::numeric_limits<std::size_t>::max() / sizeof(float) / d) {
    throw Error(ErrorKind::kFormat, "header dimensions are invalid");
  }

  std::vector<float> data(static_cast<std::size_t>(n) * d);
  const std::size_t payload_bytes = data.size() * sizeof(float);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(payload_bytes))) {
    throw Error(ErrorKind::kFormat, "embedding payload truncated: header declares " +
                                        std::to_string(n) + " x " + std::to_string(d));
  }
  unsigned char trailer[8];
  if (!in.read(reinterpret_cast<char*>(trailer), sizeof(trailer))) {
    throw Error(ErrorKind::kFormat, "embedding file is missing its checksum trailer");
  }
  const auto stored = get_le<std::uint64_t>(trailer);
  const auto actual = xxh64(std::as_bytes(std::span<const float>(data)));
  if (stored != actual) throw Error(ErrorKind::kFormat, "payload checksum mismatch");
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : data) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
  }
  return EmbeddingMatrix::from_rows(static_cast<std::size_t>(n), d, std::move(data));
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& m) {
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint16_t>(out, kVersion);
  put_le<std::uint8_t>(out, kDtypeF32);
  put_le<std::uint8_t>(out, 0);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim()));
  std::vector<float> payload(m.data().begin(), m.data().end());
  if constexpr (std::endian::native == std::endian::big) {
    for (float& v : payload) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
  }
  const auto bytes = std::as_bytes(std::span<const float>(payload));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  put_le<std::uint64_t>(out, xxh64(bytes));
  if (!out) throw Error(ErrorKind::kIo, "failed to write embedding stream");
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_embeddings(in);
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot create " + path.string());
  write_embeddings(out, m);
}

CorpusManifest read_manifest(std::istream& in) {
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "manifest line " + std::to_string(line_no);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kFormat, where + ": " + e.what());
    }
    if (!record.is_object()) throw Error(ErrorKind::kFormat, where + ": expected an object");
    ManifestEntry entry;
    for (auto [key, field] : {std::pair{"image_id", &entry.image_id}, std::pair{"path", &entry.path},
                              std::pair{"source", &entry.source}}) {
      auto it = record.find(key);
      if (it == record.end() || !it->is_string()) {
        throw Error(ErrorKind::kFormat, where + ": missing string field '" + key + "'");
      }
      *field = it->get<std::string>();
    }
    if (auto it = record.find("checksum"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw Error(ErrorKind::kFormat, where + ": checksum must be a string");
      entry.checksum = it->get<std::string>();
    }
    entries.push_back(std::move(entry));
  }
  return CorpusManifest(std::move(entries));
}

void write_manifest(std::ostream& out, const CorpusManifest& manifest) {
  for (const auto& e : manifest.entries()) {
    nlohmann::ordered_json record;
    record["image_id"] = e.image_id;
    record["path"] = e.path;
    record["source"] = e.source;
    if (e.checksum) record["checksum"] = *e.checksum;
    out << record.dump() << '\n';
  }
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return read_manifest(in);
}

EmbeddingStore ingest(std::istream& raw, std::istream& manifest) {
  EmbeddingMatrix matrix = read_embeddings(raw);
  CorpusManifest entries = read_manifest(manifest);
  if (entries.size() != matrix.rows()) {
    throw Error(ErrorKind::kConsistency, "header declares " + std::to_string(matrix.rows()) +
                                             " rows but the manifest has " +
                                             std::to_string(entries.size()) + " entries");
  }
  return EmbeddingStore{std::move(matrix), std::move(entries)};
}

}  // namespace blindpair
