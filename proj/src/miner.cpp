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
#include "blindpair/miner.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "blindpair/error.hpp"
#include "blindpair/kernel.hpp"
#include "json.hpp"

namespace blindpair {
namespace {

// JSON with float as the floating type: parsing goes through strtof and
// dumping prints the shortest float repr, so records round-trip exactly.
using FloatJson = nlohmann::basic_json<nlohmann::ordered_map, std::vector, std::string, bool,
                                       std::int64_t, std::uint64_t, float>;

constexpr std::size_t kSubBlock = 64;

bool pair_less(const BlindPair& x, const BlindPair& y) {
  return x.i != y.i ? x.i < y.i : x.j < y.j;
}

bool gap_before(const BlindPair& x, const BlindPair& y) {
  if (x.gap != y.gap) return x.gap > y.gap;
  return pair_less(x, y);
}

void check_inputs(const EmbeddingMatrix& a, const EmbeddingMatrix& b, const MinerConfig& cfg) {
  cfg.validate();
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::kConsistency, "space A has " + std::to_string(a.rows()) +
                                             " rows but space B has " + std::to_string(b.rows()));
  }
  if (!a.normalized() || !b.normalized()) {
    throw Error(ErrorKind::kValidation, "mining requires normalized embeddings");
  }
}

BlindPair make_pair(std::size_t i, std::size_t j, float sim_a, float sim_b) {
  return BlindPair{i, j, sim_a, sim_b, sim_a - sim_b};
}

void finish(std::vector<BlindPair>& pairs, const MinerConfig& cfg) {
  std::sort(pairs.begin(), pairs.end(), pair_less);
  if (cfg.dedup) {
    auto same = [](const BlindPair& x, const BlindPair& y) { return x.i == y.i && x.j == y.j; };
    pairs.erase(std::unique(pairs.begin(), pairs.end(), same), pairs.end());
  }
  if (cfg.max_pairs && pairs.size() > *cfg.max_pairs) {
    const auto keep = static_cast<std::ptrdiff_t>(*cfg.max_pairs);
    std::nth_element(pairs.begin(), pairs.begin() + keep, pairs.end(), gap_before);
    pairs.resize(*cfg.max_pairs);
    std::sort(pairs.begin(), pairs.end(), pair_less);
  }
}

// Scans one tile pair. Space A is screened first; with pruning enabled the
// first `prefix` columns give a partial sum whose Cauchy-Schwarz completion
// bounds the full similarity, and only pairs that could still exceed tau_high
// get the exact dot product.
class TileScanner {
 public:
  TileScanner(const EmbeddingMatrix& a, const EmbeddingMatrix& b, const MinerConfig& cfg)
      : a_(a), b_(b), tau_high_(static_cast<float>(cfg.tau_high)),
        tau_low_(static_cast<float>(cfg.tau_low)) {
    const std::size_t d = a.dim();
    if (d >= 256) {
      prefix_ = (d / 4) / kDotLanes * kDotLanes;
      // Bounds the rounding error of both the partial and the full sum.
      margin_ = 4.0 * static_cast<double>(d) * FLT_EPSILON + 1e-6;
      tail_norm_.resize(a.rows());
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        double sum = 0.0;
        for (std::size_t e = prefix_; e < d; ++e) sum += static_cast<double>(row[e]) * row[e];
        tail_norm_[r] = std::sqrt(sum);
      }
    }
    block_.resize(kSubBlock * kSubBlock);
  }

  void scan(std::size_t i_begin, std::size_t i_end, std::size_t j_begin, std::size_t j_end,
            std::vector<BlindPair>& out, MinerStats& stats) {
    for (std::size_t ib = i_begin; ib < i_end; ib += kSubBlock) {
      const std::size_t ie = std::min(ib + kSubBlock, i_end);
      for (std::size_t jb = std::max(j_begin, ib); jb < j_end; jb += kSubBlock) {
        const std::size_t je = std::min(jb + kSubBlock, j_end);
        scan_block(ib, ie, jb, je, out, stats);
      }
    }
  }

 private:
  void scan_block(std::size_t ib, std::size_t ie, std::size_t jb, std::size_t je,
                  std::vector<BlindPair>& out, MinerStats& stats) {
    const std::size_t d = a_.dim();
    const std::size_t rows_i = ie - ib;
    const std::size_t rows_j = je - jb;
    const float* base = a_.data().data();
    const std::size_t len = prefix_ > 0 ? prefix_ : d;
    dot_block(base + ib * d, rows_i, d, base + jb * d, rows_j, d, len, block_.data());

    for (std::size_t r = 0; r < rows_i; ++r) {
      const std::size_t i = ib + r;
      const std::size_t c0 = jb > i ? 0 : i + 1 - jb;
      for (std::size_t c = c0; c < rows_j; ++c) {
        const std::size_t j = jb + c;
        ++stats.pairs_scanned;
        float sim_a = block_[r * rows_j + c];
        if (prefix_ > 0) {
          const double bound = sim_a + tail_norm_[i] * tail_norm_[j] + margin_;
          if (bound <= tau_high_) {
            ++stats.pruned;
            continue;
          }
          sim_a = dot(a_.row(i), a_.row(j));
        }
        if (!(sim_a > tau_high_)) continue;
        ++stats.candidates_a;
        const float sim_b = dot(b_.row(i), b_.row(j));
        if (sim_b < tau_low_) {
          ++stats.matched;
          out.push_back(make_pair(i, j, sim_a, sim_b));
        }
      }
    }
  }

  const EmbeddingMatrix& a_;
  const EmbeddingMatrix& b_;
  float tau_high_;
  float tau_low_;
  std::size_t prefix_ = 0;
  double margin_ = 0.0;
  std::vector<double> tail_norm_;
  std::vector<float> block_;
};

}  // namespace

void MinerConfig::validate() const {
  auto in_range = [](double t) { return std::isfinite(t) && t >= -1.0 && t <= 1.0; };
  if (!in_range(tau_high)) throw Error(ErrorKind::kValidation, "tau_high must lie in [-1, 1]");
  if (!in_range(tau_low)) throw Error(ErrorKind::kValidation, "tau_low must lie in [-1, 1]");
  if (tile < 1) throw Error(ErrorKind::kValidation, "tile must be at least 1");
}

bool qualifies(float sim_a, float sim_b, const MinerConfig& cfg) {
  return sim_a > static_cast<float>(cfg.tau_high) && sim_b < static_cast<float>(cfg.tau_low);
}

std::vector<BlindPair> mine_blind_pairs(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                        const MinerConfig& cfg, std::size_t workers,
                                        MinerStats* stats) {
  check_inputs(a, b, cfg);
  const std::size_t n = a.rows();
  const std::size_t tiles = (n + cfg.tile - 1) / cfg.tile;

  struct Unit {
    std::size_t ti, tj;
  };
  std::vector<Unit> units;
  units.reserve(tiles * (tiles + 1) / 2);
  for (std::size_t ti = 0; ti < tiles; ++ti) {
    for (std::size_t tj = ti; tj < tiles; ++tj) units.push_back({ti, tj});
  }

  std::vector<std::vector<BlindPair>> found(units.size());
  std::vector<MinerStats> unit_stats(units.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    TileScanner scanner(a, b, cfg);
    for (std::size_t u = next.fetch_add(1); u < units.size(); u = next.fetch_add(1)) {
      const auto [ti, tj] = units[u];
      scanner.scan(ti * cfg.tile, std::min(n, (ti + 1) * cfg.tile), tj * cfg.tile,
                   std::min(n, (tj + 1) * cfg.tile), found[u], unit_stats[u]);
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(units.size(), 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::size_t total = 0;
  for (const auto& f : found) total += f.size();
  std::vector<BlindPair> pairs;
  pairs.reserve(total);
  MinerStats sum;
  for (std::size_t u = 0; u < units.size(); ++u) {
    pairs.insert(pairs.end(), found[u].begin(), found[u].end());
    sum.pairs_scanned += unit_stats[u].pairs_scanned;
    sum.pruned += unit_stats[u].pruned;
    sum.candidates_a += unit_stats[u].candidates_a;
    sum.matched += unit_stats[u].matched;
  }
  finish(pairs, cfg);
  if (stats) *stats = sum;
  return pairs;
}

std::vector<BlindPair> brute_force_mine(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                                        const MinerConfig& cfg) {
  check_inputs(a, b, cfg);
  std::vector<BlindPair> pairs;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.rows(); ++j) {
      const float sim_a = dot(a.row(i), a.row(j));
      const float sim_b = dot(b.row(i), b.row(j));
      if (qualifies(sim_a, sim_b, cfg)) pairs.push_back(make_pair(i, j, sim_a, sim_b));
    }
  }
  if (cfg.max_pairs && pairs.size() > *cfg.max_pairs) {
    std::sort(pairs.begin(), pairs.end(), gap_before);
    pairs.resize(*cfg.max_pairs);
    std::sort(pairs.begin(), pairs.end(), pair_less);
  }
  return pairs;
}

std::vector<BlindPair> rank_pairs(std::vector<BlindPair> pairs) {
  std::stable_sort(pairs.begin(), pairs.end(), gap_before);
  return pairs;
}

void write_pairs(std::ostream& out, std::span<const BlindPair> pairs,
                 const CorpusManifest& manifest) {
  std::vector<PairRecord> records;
  records.reserve(pairs.size());
  for (const auto& p : pairs) {
    records.push_back({p, manifest.at(p.i).image_id, manifest.at(p.j).image_id});
  }
  write_pair_records(out, records);
}

void write_pair_records(std::ostream& out, std::span<const PairRecord> records) {
  for (const auto& r : records) {
    FloatJson line;
    line["i"] = r.pair.i;
    line["j"] = r.pair.j;
    line["image_id_i"] = r.image_id_i;
    line["image_id_j"] = r.image_id_j;
    line["sim_a"] = r.pair.sim_a;
    line["sim_b"] = r.pair.sim_b;
    line["gap"] = r.pair.gap;
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed to write pair records");
}

std::vector<PairRecord> read_pairs(std::istream& in) {
  std::vector<PairRecord> records;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "pairs line " + std::to_string(line_no);
    try {
      const auto line = FloatJson::parse(text);
      PairRecord r;
      r.pair.i = line.at("i").get<std::uint64_t>();
      r.pair.j = line.at("j").get<std::uint64_t>();
      r.pair.sim_a = line.at("sim_a").get<float>();
      r.pair.sim_b = line.at("sim_b").get<float>();
      r.pair.gap = line.at("gap").get<float>();
      r.image_id_i = line.value("image_id_i", std::string{});
      r.image_id_j = line.value("image_id_j", std::string{});
      if (r.pair.i >= r.pair.j) throw Error(ErrorKind::kFormat, where + ": requires i < j");
      records.push_back(std::move(r));
    } catch (const FloatJson::exception& e) {
      throw Error(ErrorKind::kFormat, where + ": " + e.what());
    }
  }
  return records;
}

}  // namespace blindpair
