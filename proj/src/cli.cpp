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
#include "blindpair/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "blindpair/bench.hpp"
#include "blindpair/bench_io.hpp"
#include "blindpair/checksum.hpp"
#include "blindpair/curation.hpp"
#include "blindpair/embed_store.hpp"
#include "blindpair/error.hpp"
#include "blindpair/http_service.hpp"
#include "blindpair/miner.hpp"
#include "blindpair/mof.hpp"
#include "json.hpp"

namespace blindpair::cli {
namespace {

constexpr const char* kEmbeddingHelp =
    "Embedding files (.emb): \"EMB1\" | u16 version=1 | u8 dtype=1 (f32) | u8 0 |\n"
    "u64 n | u32 d | n*d little-endian f32, row-major | u64 xxh64(payload, seed 0).\n"
    "Manifest: one JSON object per line {image_id, path, source, checksum?};\n"
    "line k names row k.";

constexpr const char* kPairsHelp =
    "Pairs files: one JSON object per line\n"
    "{i, j, image_id_i, image_id_j, sim_a, sim_b, gap}, i < j, sorted by (i, j).";

constexpr const char* kBenchmarkHelp =
    "Benchmark: {version: 1, pairs: [{pair_id, images: [a, b],\n"
    "  questions: [{question_id, text, options: [...], correct_index, notation?} x2],\n"
    "  patterns: [orientation_direction | presence_of_features | state_condition |\n"
    "             quantity_count | positional_relational | color_appearance |\n"
    "             structural_physical | text | viewpoint_perspective, ...]}]}\n"
    "Responses: {model_id, answers: {question_id: option index | null}}.";

struct Globals {
  std::size_t threads = std::max(1U, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;
  std::string format = "json";
};

// Writes to --out when given (and not "-"), otherwise to the data stream.
void emit(const std::string& path, const std::string& data, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIo, "cannot create " + path);
  f << data;
  if (!f) throw Error(ErrorKind::kIo, "failed writing " + path);
}

std::vector<PairRecord> load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return read_pairs(in);
}

// Whitespace- or comma-separated numbers; a non-numeric first line is a header.
std::vector<std::vector<double>> read_number_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    bool bad = false;
    while (ss >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        bad = true;
        break;
      }
      row.push_back(v);
    }
    if (bad) {
      if (line_no == 1) continue;
      throw Error(ErrorKind::kFormat, path + " line " + std::to_string(line_no) + ": not a number");
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> read_series(const std::string& path) {
  std::vector<double> out;
  for (const auto& row : read_number_rows(path)) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

std::pair<std::size_t, std::size_t> parse_grid(const std::string& spec) {
  const auto x = spec.find('x');
  std::size_t h = 0, w = 0;
  if (x != std::string::npos) {
    auto r1 = std::from_chars(spec.data(), spec.data() + x, h);
    auto r2 = std::from_chars(spec.data() + x + 1, spec.data() + spec.size(), w);
    if (r1.ec == std::errc() && r2.ec == std::errc() && r2.ptr == spec.data() + spec.size() && h > 0 && w > 0) {
      return {h, w};
    }
  }
  throw Error(ErrorKind::kValidation, "grid must look like HxW, e.g. 16x16");
}

mof::FeatureGrid random_grid(std::size_t h, std::size_t w, std::size_t d, mof::Source src,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0F, 1.0F);
  std::vector<float> v(h * w * d);
  for (auto& x : v) x = dist(rng);
  return mof::FeatureGrid(h, w, d, std::move(v), src);
}

mof::FeatureGrid grid_from_file(const std::string& path, std::size_t h, std::size_t w, mof::Source src) {
  const auto m = load_embeddings(path);
  if (m.rows() != h * w) {
    throw Error(ErrorKind::kShapeMismatch, path + " has " + std::to_string(m.rows()) +
                                               " tokens, grid needs " + std::to_string(h * w));
  }
  return mof::FeatureGrid(h, w, m.dim(), std::vector<float>(m.data().begin(), m.data().end()), src);
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

// ---------------------------------------------------------------------------

void add_ingest(CLI::App& app, const Globals& g, std::ostream& out) {
  auto* cmd = app.add_subcommand("ingest", "Validate an embedding file against its manifest");
  cmd->footer(std::string(kEmbeddingHelp) +
              "\nWith --from-text, rows are read from a whitespace/comma separated text file\n"
              "and written to --out as an embedding file.");
  auto opts = std::make_shared<std::tuple<std::string, std::string, std::string, std::string>>();
  auto& [emb, text, manifest, out_path] = *opts;
  auto* e = cmd->add_option("--embeddings", emb, "Embedding file")->check(CLI::ExistingFile);
  auto* t = cmd->add_option("--from-text", text, "Text file with one vector per line")->check(CLI::ExistingFile);
  e->excludes(t);
  cmd->add_option("--manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", out_path, "Embedding file to write (required with --from-text)");
  cmd->callback([opts, &g, &out] {
    auto& [emb, text, manifest, out_path] = *opts;
    if (emb.empty() == text.empty()) {
      throw Error(ErrorKind::kValidation, "give exactly one of --embeddings or --from-text");
    }
    if (!text.empty()) {
      if (out_path.empty()) throw Error(ErrorKind::kValidation, "--from-text needs --out");
      const auto rows = read_number_rows(text);
      if (rows.empty()) throw Error(ErrorKind::kData, text + " holds no vectors");
      std::vector<float> data;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) {
          throw Error(ErrorKind::kShapeMismatch, "row " + std::to_string(r) + " has a different width");
        }
        for (double v : rows[r]) data.push_back(static_cast<float>(v));
      }
      save_embeddings(out_path, EmbeddingMatrix::from_rows(rows.size(), rows.front().size(), std::move(data)));
      emb = out_path;
    }
    std::ifstream raw(emb, std::ios::binary);
    std::ifstream man(manifest);
    if (!raw || !man) throw Error(ErrorKind::kIo, "cannot open inputs");
    const auto store = ingest(raw, man);
    if (text.empty() && !out_path.empty()) save_embeddings(out_path, store.matrix);

    std::map<std::string, std::size_t> sources;
    for (const auto& entry : store.manifest.entries()) ++sources[entry.source];
    const auto checksum = xxh64(std::as_bytes(store.matrix.data()));
    if (g.format == "text") {
      out << "n=" << store.matrix.rows() << " d=" << store.matrix.dim() << " checksum=" << hex64(checksum) << '\n';
      for (const auto& [src, count] : sources) out << "  " << src << ": " << count << '\n';
      return;
    }
    nlohmann::ordered_json j;
    j["n"] = store.matrix.rows();
    j["d"] = store.matrix.dim();
    j["normalized"] = store.matrix.normalized();
    j["checksum"] = hex64(checksum);
    j["sources"] = sources;
    out << j.dump() << '\n';
  });
}

void add_normalize(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("normalize", "Scale every row to unit L2 norm");
  cmd->footer(kEmbeddingHelp);
  auto opts = std::make_shared<std::pair<std::string, std::string>>();
  cmd->add_option("--in", opts->first, "Input embedding file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->second, "Output embedding file")->required();
  cmd->callback([opts, &out] {
    const auto m = normalize(load_embeddings(opts->first));
    save_embeddings(opts->second, m);
    out << "normalized " << m.rows() << " rows of width " << m.dim() << '\n';
  });
}

void add_mine(CLI::App& app, const Globals& g, std::ostream& out, std::ostream& err) {
  auto* cmd = app.add_subcommand("mine", "Find pairs similar in space A and dissimilar in space B");
  cmd->footer(std::string(kEmbeddingHelp) + "\n" + kPairsHelp +
              "\nBoth inputs are normalized before comparison. A pair is emitted when\n"
              "sim_a > tau-high and sim_b < tau-low.");
  struct Opts {
    std::string a, b, manifest, out;
    MinerConfig cfg;
    std::size_t max_pairs = 0;
    bool stats = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--a", o->a, "Space A embeddings (e.g. the vision-language encoder)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--b", o->b, "Space B embeddings (e.g. the vision-only encoder)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--manifest", o->manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  cmd->add_option("--tau-high", o->cfg.tau_high, "Space A threshold")->capture_default_str();
  cmd->add_option("--tau-low", o->cfg.tau_low, "Space B threshold")->capture_default_str();
  cmd->add_option("--tile", o->cfg.tile, "Tile edge in rows")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--max-pairs", o->max_pairs, "Keep only the N largest-gap pairs");
  cmd->add_option("--out", o->out, "Output pairs file (default stdout)");
  cmd->add_flag("--stats", o->stats, "Print scan counters to stderr");
  cmd->callback([o, &g, &out, &err] {
    if (o->max_pairs > 0) o->cfg.max_pairs = o->max_pairs;
    o->cfg.validate();
    const auto manifest = load_manifest(o->manifest);
    const auto a = normalize(load_embeddings(o->a));
    const auto b = normalize(load_embeddings(o->b));
    if (manifest.size() != a.rows()) {
      throw Error(ErrorKind::kConsistency, "manifest has " + std::to_string(manifest.size()) +
                                               " entries but the embeddings have " + std::to_string(a.rows()) + " rows");
    }
    MinerStats stats;
    const auto pairs = mine_blind_pairs(a, b, o->cfg, g.threads, &stats);
    std::ostringstream ss;
    write_pairs(ss, pairs, manifest);
    emit(o->out, ss.str(), out);
    if (o->stats) {
      err << "scanned=" << stats.pairs_scanned << " pruned=" << stats.pruned
          << " candidates_a=" << stats.candidates_a << " matched=" << stats.matched
          << " emitted=" << pairs.size() << '\n';
    }
  });
}

void add_rank(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("rank", "Order pairs by gap for curation");
  cmd->footer(std::string(kPairsHelp) + "\nOutput is sorted by gap descending, ties by (i, j).");
  auto opts = std::make_shared<std::pair<std::string, std::string>>();
  cmd->add_option("--pairs", opts->first, "Pairs file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts->second, "Output file (default stdout)");
  cmd->callback([opts, &out] {
    auto records = load_pairs(opts->first);
    std::vector<BlindPair> pairs;
    std::map<std::pair<std::uint64_t, std::uint64_t>, const PairRecord*> by_key;
    for (const auto& r : records) {
      pairs.push_back(r.pair);
      by_key[{r.pair.i, r.pair.j}] = &r;
    }
    std::vector<PairRecord> ranked;
    for (const auto& p : rank_pairs(std::move(pairs))) ranked.push_back(*by_key.at({p.i, p.j}));
    std::ostringstream ss;
    write_pair_records(ss, ranked);
    emit(opts->second, ss.str(), out);
  });
}

void add_score(CLI::App& app, const Globals& g, std::ostream& out) {
  auto* score = app.add_subcommand("score", "Score model answers or similarity matrices");
  score->require_subcommand(1);

  auto* mmvp = score->add_subcommand("mmvp", "Pair-level accuracy of multiple-choice answers");
  mmvp->footer(std::string(kBenchmarkHelp) +
               "\nA pair counts as correct only when both of its questions are answered\n"
               "correctly. Missing or null answers count as wrong. With several --responses\n"
               "files, --format csv prints one column per model.");
  struct MmvpOpts {
    std::string benchmark;
    std::vector<std::string> responses;
    double in1k = std::nan("");
  };
  auto m = std::make_shared<MmvpOpts>();
  mmvp->add_option("--benchmark", m->benchmark, "Benchmark file")->required()->check(CLI::ExistingFile);
  mmvp->add_option("--responses", m->responses, "Responses file(s)")->required()->check(CLI::ExistingFile);
  mmvp->add_option("--in1k-zeroshot", m->in1k, "Externally measured zero-shot accuracy to attach");
  mmvp->callback([m, &g, &out] {
    const auto bench = bench::load_benchmark(m->benchmark);
    std::vector<bench::ScoreReport> reports;
    for (const auto& path : m->responses) {
      auto r = bench::score_mmvp(bench.pairs, bench::load_responses(path));
      if (!std::isnan(m->in1k)) r.in1k_zeroshot = m->in1k;
      reports.push_back(std::move(r));
    }
    if (g.format == "csv") {
      bench::write_pattern_csv(out, reports);
    } else if (g.format == "text") {
      for (const auto& r : reports) bench::write_text(out, r);
    } else {
      for (const auto& r : reports) out << bench::to_json(r).dump(2) << '\n';
    }
  });

  auto* vlm = score->add_subcommand("vlm", "Pair-level image-text matching accuracy");
  vlm->footer(
      "Sims file: one JSON object per line {pair_id, sims: [[s00, s01], [s10, s11]], pattern}\n"
      "where sims[img][txt] scores image img against text txt and (k, k) are the true\n"
      "matches. A pair is correct when, for each text, its image scores strictly higher\n"
      "than the other image (--per-image flips to per-image text selection).");
  struct VlmOpts {
    std::string sims;
    std::string model_id = "model";
    bool per_image = false;
  };
  auto v = std::make_shared<VlmOpts>();
  vlm->add_option("--sims", v->sims, "Similarity file")->required()->check(CLI::ExistingFile);
  vlm->add_option("--model-id", v->model_id, "Name used in the report")->capture_default_str();
  vlm->add_flag("--per-image", v->per_image, "Score per-image text selection instead");
  vlm->callback([v, &g, &out] {
    const auto sims = bench::load_vlm_sims(v->sims);
    std::map<std::string, bool> results;
    std::map<std::string, bench::Pattern> pattern_of;
    const auto dir = v->per_image ? bench::MatchDirection::kPerImage : bench::MatchDirection::kPerText;
    for (const auto& s : sims) {
      if (!results.emplace(s.pair_id, bench::score_vlm_pair(s.sims, dir)).second) {
        throw Error(ErrorKind::kValidation, "duplicate pair_id '" + s.pair_id + "'");
      }
      if (s.pattern) pattern_of[s.pair_id] = *s.pattern;
    }
    const auto report = bench::aggregate_vlm(results, pattern_of);
    if (g.format == "csv") {
      std::vector<bench::VlmReport> reports{report};
      std::vector<std::string> ids{v->model_id};
      bench::write_pattern_csv(out, reports, ids);
    } else if (g.format == "text") {
      out << v->model_id << ": " << report.pairs_correct << "/" << report.pairs_total
          << " pairs, average over patterns " << std::fixed << std::setprecision(1)
          << bench::round1(report.average) << "%\n";
    } else {
      out << bench::to_json(report, v->model_id).dump(2) << '\n';
    }
  });
}

void add_correlate(CLI::App& app, const Globals& g, std::ostream& out) {
  auto* cmd = app.add_subcommand("correlate", "Pearson correlation of two score series");
  cmd->footer("Each file holds numbers separated by commas, whitespace or newlines; a\n"
              "non-numeric first line is skipped as a header. Values pair up by position.");
  auto opts = std::make_shared<std::pair<std::string, std::string>>();
  cmd->add_option("--x", opts->first, "First series")->required()->check(CLI::ExistingFile);
  cmd->add_option("--y", opts->second, "Second series")->required()->check(CLI::ExistingFile);
  cmd->callback([opts, &g, &out] {
    const auto x = read_series(opts->first);
    const auto y = read_series(opts->second);
    const double r = bench::pearson(x, y);
    if (g.format == "text") {
      out << "r=" << format_double(r) << " n=" << x.size() << '\n';
    } else if (g.format == "csv") {
      out << "r,n\n" << format_double(r) << ',' << x.size() << '\n';
    } else {
      nlohmann::ordered_json j;
      j["r"] = r;
      j["n"] = x.size();
      out << j.dump() << '\n';
    }
  });
}

void add_ablate(CLI::App& app, std::ostream& out) {
  auto* ablate = app.add_subcommand("ablate", "Question-format ablations of a benchmark");
  ablate->require_subcommand(1);

  auto* swap = ablate->add_subcommand("swap", "Swap the two options of every question");
  swap->footer(std::string(kBenchmarkHelp) +
               "\nEvery question must have exactly two options. --responses rewrites a response\n"
               "file so each answer names the same option text in the swapped benchmark.");
  struct SwapOpts {
    std::string benchmark, out, responses, responses_out;
  };
  auto s = std::make_shared<SwapOpts>();
  swap->add_option("--benchmark", s->benchmark, "Benchmark file")->required()->check(CLI::ExistingFile);
  swap->add_option("--out", s->out, "Output benchmark (default stdout)");
  auto* r_in = swap->add_option("--responses", s->responses, "Responses to remap")->check(CLI::ExistingFile);
  swap->add_option("--responses-out", s->responses_out, "Remapped responses file")->needs(r_in);
  swap->callback([s, &out] {
    auto b = bench::load_benchmark(s->benchmark);
    if (!s->responses.empty() && s->responses_out.empty()) {
      throw Error(ErrorKind::kValidation, "--responses needs --responses-out");
    }
    if (!s->responses.empty()) {
      const auto remapped = bench::swap_responses(bench::load_responses(s->responses), b.pairs);
      emit(s->responses_out, bench::to_json(remapped).dump(2) + "\n", out);
    }
    for (auto& p : b.pairs) p = bench::swap_options(p);
    emit(s->out, bench::dump_benchmark(b), out);
  });

  auto* ren = ablate->add_subcommand("renotate", "Change option labels between (a) and (1) styles");
  ren->footer(std::string(kBenchmarkHelp) + "\nOnly the 'notation' field changes.");
  struct RenOpts {
    std::string benchmark, out, scheme;
  };
  auto r = std::make_shared<RenOpts>();
  ren->add_option("--benchmark", r->benchmark, "Benchmark file")->required()->check(CLI::ExistingFile);
  ren->add_option("--scheme", r->scheme, "letters | numbers")->required();
  ren->add_option("--out", r->out, "Output benchmark (default stdout)");
  ren->callback([r, &out] {
    auto b = bench::load_benchmark(r->benchmark);
    const auto scheme = bench::parse_notation(r->scheme);
    for (auto& p : b.pairs) p = bench::renotate(p, scheme);
    emit(r->out, bench::dump_benchmark(b), out);
  });
}

void add_mof(CLI::App& app, const Globals& g, std::ostream& out) {
  auto* mofc = app.add_subcommand("mof", "Mixture-of-features operators on token grids");
  mofc->require_subcommand(1);

  auto* mix = mofc->add_subcommand("mix", "Additive mixing sweep over SSL ratios");
  mix->footer(std::string(kEmbeddingHelp) +
              "\nGrids are embedding files with grid_h * grid_w rows, or random grids drawn\n"
              "from --seed when no files are given. Output CSV columns:\n"
              "ssl_ratio,clip_weight,tokens,dim,grid_h,grid_w,source,frobenius_norm,mean_token_norm");
  struct MixOpts {
    std::string clip, ssl, grid = "16x16";
    std::size_t dim = 64;
    std::vector<double> ratios;
  };
  auto m = std::make_shared<MixOpts>();
  auto* c = mix->add_option("--clip", m->clip, "CLIP-side grid file")->check(CLI::ExistingFile);
  mix->add_option("--ssl", m->ssl, "SSL-side grid file")->check(CLI::ExistingFile)->needs(c);
  c->needs("--ssl");
  mix->add_option("--grid", m->grid, "Grid shape HxW")->capture_default_str();
  mix->add_option("--dim", m->dim, "Token width for random grids")->capture_default_str()->check(CLI::PositiveNumber);
  mix->add_option("--ratios", m->ratios, "SSL ratios (default 0,.25,.5,.625,.75,.875,1)")->delimiter(',');
  mix->callback([m, &g, &out] {
    const auto [h, w] = parse_grid(m->grid);
    std::mt19937_64 rng(g.seed);
    const auto clip = m->clip.empty() ? random_grid(h, w, m->dim, mof::Source::kClip, rng)
                                      : grid_from_file(m->clip, h, w, mof::Source::kClip);
    const auto ssl = m->ssl.empty() ? random_grid(h, w, m->dim, mof::Source::kSsl, rng)
                                    : grid_from_file(m->ssl, h, w, mof::Source::kSsl);
    std::vector<double> ratios = m->ratios;
    if (ratios.empty()) ratios.assign(std::begin(mof::kSslRatioGrid), std::end(mof::kSslRatioGrid));
    out << "ssl_ratio,clip_weight,tokens,dim,grid_h,grid_w,source,frobenius_norm,mean_token_norm\n";
    for (double r : ratios) {
      const auto mixed = mof::additive_mof(clip, ssl, mof::MixRatio(r));
      double total = 0.0, token_norms = 0.0;
      for (std::size_t k = 0; k < mixed.tokens(); ++k) {
        double sq = 0.0;
        for (float v : mixed.token(k)) sq += static_cast<double>(v) * v;
        total += sq;
        token_norms += std::sqrt(sq);
      }
      out << format_double(r) << ',' << format_double(1.0 - r) << ',' << mixed.tokens() << ','
          << mixed.dim() << ',' << mixed.grid_h() << ',' << mixed.grid_w() << ','
          << mof::to_string(mixed.source()) << ',' << format_double(std::sqrt(total)) << ','
          << format_double(token_norms / static_cast<double>(mixed.tokens())) << '\n';
    }
  });

  auto* inter = mofc->add_subcommand("interleave", "Token counts of interleaved sequences");
  inter->footer("Interleaves random equal-size grids for each (image edge, patch edge) and\n"
                "prints: image_edge,patch_edge,tokens_per_encoder,interleaved_tokens.\n"
                "Defaults to the 224/14 and 336/14 settings.");
  struct InterOpts {
    std::vector<std::size_t> edges{224, 336};
    std::size_t patch = 14;
    std::size_t dim = 8;
  };
  auto in = std::make_shared<InterOpts>();
  inter->add_option("--image-edge", in->edges, "Image edge(s) in pixels")->delimiter(',');
  inter->add_option("--patch-edge", in->patch, "Patch edge in pixels")->capture_default_str();
  inter->add_option("--dim", in->dim, "Token width of the random grids")->capture_default_str()->check(CLI::PositiveNumber);
  inter->callback([in, &g, &out] {
    std::mt19937_64 rng(g.seed);
    out << "image_edge,patch_edge,tokens_per_encoder,interleaved_tokens\n";
    for (std::size_t edge : in->edges) {
      const std::size_t n = mof::token_count(edge, in->patch);
      const std::size_t side = edge / in->patch;
      const auto clip = random_grid(side, side, in->dim, mof::Source::kClip, rng);
      const auto ssl = random_grid(side, side, in->dim, mof::Source::kSsl, rng);
      const auto seq = mof::interleave_mof(clip, ssl);
      out << edge << ',' << in->patch << ',' << n << ',' << seq.size() << '\n';
    }
  });

  auto* tokens = mofc->add_subcommand("tokens", "Patch tokens per encoder: (image/patch)^2");
  std::shared_ptr<std::pair<std::size_t, std::size_t>> t = std::make_shared<std::pair<std::size_t, std::size_t>>(224, 14);
  tokens->add_option("--image-edge", t->first, "Image edge in pixels")->capture_default_str();
  tokens->add_option("--patch-edge", t->second, "Patch edge in pixels")->capture_default_str();
  tokens->callback([t, &g, &out] {
    const auto n = mof::token_count(t->first, t->second);
    if (g.format == "text") {
      out << n << " tokens per encoder, " << 2 * n << " interleaved\n";
    } else if (g.format == "csv") {
      out << "tokens_per_encoder,interleaved_tokens\n" << n << ',' << 2 * n << '\n';
    } else {
      nlohmann::ordered_json j;
      j["tokens_per_encoder"] = n;
      j["interleaved_tokens"] = 2 * n;
      out << j.dump() << '\n';
    }
  });
}

void add_serve(CLI::App& app, std::ostream& err) {
  auto* cmd = app.add_subcommand("serve", "HTTP backend for pair curation");
  cmd->footer(std::string(kPairsHelp) +
              "\nEndpoints: GET /api/pairs?page=&size=&sort=gap_desc|index_asc&status=,\n"
              "GET /api/pairs/{id}, PUT /api/pairs/{id}/annotation, GET /api/export,\n"
              "GET /img/{image_id}?thumb=1, GET /api/health. Pair ids are \"<i>-<j>\".\n"
              "Annotations are appended to --log, one JSON object per line. Use port 0 to\n"
              "bind an ephemeral port; the bound address is printed to stderr.");
  struct ServeOpts {
    std::string pairs, manifest, corpus_root, log, bind = "127.0.0.1:8080", thumbs, ui;
  };
  auto s = std::make_shared<ServeOpts>();
  cmd->add_option("--pairs", s->pairs, "Mined pairs file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--manifest", s->manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  cmd->add_option("--corpus-root", s->corpus_root, "Directory the manifest paths are relative to")->required();
  cmd->add_option("--log", s->log, "Annotation log file")->required();
  cmd->add_option("--bind", s->bind, "host:port")->capture_default_str();
  cmd->add_option("--thumb-cache", s->thumbs, "Thumbnail cache directory (default <log>.thumbs)");
  cmd->add_option("--ui-dir", s->ui, "Static frontend bundle served at /")->check(CLI::ExistingDirectory);
  cmd->callback([s, &err] {
    const auto colon = s->bind.rfind(':');
    int port = -1;
    if (colon != std::string::npos) {
      auto [ptr, ec] = std::from_chars(s->bind.data() + colon + 1, s->bind.data() + s->bind.size(), port);
      if (ec != std::errc() || ptr != s->bind.data() + s->bind.size()) port = -1;
    }
    if (port < 0 || port > 65535) throw Error(ErrorKind::kValidation, "--bind must be host:port");
    const std::string host = s->bind.substr(0, colon);

    curation::CurationStore store(load_pairs(s->pairs), load_manifest(s->manifest), s->log);
    curation::ServiceOptions options;
    options.corpus_root = s->corpus_root;
    options.thumb_cache = s->thumbs.empty() ? std::filesystem::path(s->log + ".thumbs") : std::filesystem::path(s->thumbs);
    if (!s->ui.empty()) options.ui_dir = s->ui;
    curation::HttpService service(store, options);

    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    const int bound = service.bind(host, port);
    err << "listening on http://" << host << ":" << bound << std::endl;
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&set, &sig);
      service.stop();
    });
    service.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Blind-pair mining, visual-pattern benchmark scoring and feature mixing", "blindpair");
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for any randomized output")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}))->capture_default_str();

  add_ingest(app, g, out);
  add_normalize(app, out);
  add_mine(app, g, out, err);
  add_rank(app, out);
  add_score(app, g, out);
  add_correlate(app, g, out);
  add_ablate(app, out);
  add_mof(app, g, out);
  add_serve(app, err);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kExitOk;
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_validation_kind(e.kind()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace blindpair::cli
