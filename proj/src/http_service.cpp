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
#include "blindpair/http_service.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "blindpair/bench_io.hpp"
#include "blindpair/error.hpp"
#include "blindpair/thumbnails.hpp"
#include "httplib.h"

namespace blindpair::curation {
namespace {

constexpr const char* kJson = "application/json";

// Widened floats print as e.g. 0.949999988079071; go through the shortest
// float repr instead so the API shows 0.95.
double short_double(float v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kIo: return 500;
    default: return 400;
  }
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  res.status = status;
  res.set_content(j.dump(), kJson);
}

void send_json(httplib::Response& res, const nlohmann::ordered_json& j) {
  res.status = 200;
  res.set_content(j.dump(), kJson);
}

std::size_t size_param(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorKind::kValidation, std::string("query parameter '") + key + "' must be a non-negative integer");
  }
  return out;
}

const char* content_type_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "image file missing: " + p.filename().string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Resolves a manifest path under the corpus root, refusing anything that
// would escape it.
std::filesystem::path resolve_under(const std::filesystem::path& root, const std::string& rel) {
  const std::filesystem::path p(rel);
  if (p.is_absolute()) throw Error(ErrorKind::kValidation, "manifest paths must be relative");
  for (const auto& part : p) {
    if (part == "..") throw Error(ErrorKind::kValidation, "manifest path escapes the corpus root");
  }
  return root / p;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

}  // namespace

nlohmann::ordered_json pair_view_json(const PairView& v) {
  nlohmann::ordered_json j;
  j["pair_id"] = v.pair_id;
  j["i"] = v.record.pair.i;
  j["j"] = v.record.pair.j;
  j["image_id_i"] = v.record.image_id_i;
  j["image_id_j"] = v.record.image_id_j;
  j["sim_a"] = short_double(v.record.pair.sim_a);
  j["sim_b"] = short_double(v.record.pair.sim_b);
  j["gap"] = short_double(v.record.pair.gap);
  j["thumbnails"] = {"/img/" + httplib::detail::encode_url(v.record.image_id_i) + "?thumb=1",
                     "/img/" + httplib::detail::encode_url(v.record.image_id_j) + "?thumb=1"};
  j["status"] = v.annotation ? std::string(to_string(v.annotation->status)) : std::string("none");
  return j;
}

HttpService::HttpService(CurationStore& store, ServiceOptions options)
    : store_(store), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  if (options_.thumb_cache.empty()) {
    options_.thumb_cache = std::filesystem::temp_directory_path() / "blindpair-thumbs";
  }
  install_routes();
}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::kIo, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpService::listen() { server_->listen_after_bind(); }

void HttpService::stop() { server_->stop(); }

void HttpService::install_routes() {
  auto& srv = *server_;

  srv.Get("/api/health", guarded([this](const httplib::Request&, httplib::Response& res) {
    nlohmann::ordered_json j;
    j["status"] = "ok";
    j["pairs"] = store_.pair_count();
    j["annotations"] = store_.log_length();
    send_json(res, j);
  }));

  srv.Get("/api/pairs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::size_t page = size_param(req, "page", 1);
    const std::size_t size = size_param(req, "size", options_.default_page_size);
    const auto sort = parse_sort(req.has_param("sort") ? req.get_param_value("sort") : "gap_desc");
    const auto filter = parse_status_filter(req.has_param("status") ? req.get_param_value("status") : "");
    const auto result = store_.list_pairs(page, size, sort, filter);
    nlohmann::ordered_json j;
    j["page"] = result.page;
    j["size"] = result.page_size;
    j["total"] = result.total;
    j["pages"] = (result.total + result.page_size - 1) / result.page_size;
    auto& items = j["items"] = nlohmann::ordered_json::array();
    for (const auto& v : result.items) items.push_back(pair_view_json(v));
    send_json(res, j);
  }));

  srv.Get("/api/pairs/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto view = store_.get_pair(req.path_params.at("id"));
    if (!view) throw Error(ErrorKind::kNotFound, "unknown pair " + req.path_params.at("id"));
    auto j = pair_view_json(*view);
    j["annotation"] = view->annotation ? to_json(*view->annotation) : nlohmann::ordered_json(nullptr);
    send_json(res, j);
  }));

  srv.Put("/api/pairs/:id/annotation", guarded([this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kValidation, std::string("request body is not JSON: ") + e.what());
    }
    auto a = annotation_from_json(body);
    a.seq = 0;
    const auto seq = store_.put_annotation(req.path_params.at("id"), std::move(a));
    nlohmann::ordered_json j;
    j["seq"] = seq;
    send_json(res, j);
  }));

  srv.Get("/api/export", guarded([this](const httplib::Request&, httplib::Response& res) {
    try {
      res.set_content(bench::dump_benchmark(store_.export_benchmark()), kJson);
      res.status = 200;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kValidation) throw;
      send_error(res, 409, e.what());
    }
  }));

  srv.Get("/img/:image_id", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string image_id = req.path_params.at("image_id");
    const auto row = store_.manifest().find(image_id);
    if (!row) throw Error(ErrorKind::kNotFound, "unknown image " + image_id);
    const auto source = resolve_under(options_.corpus_root, store_.manifest().at(*row).path);
    if (!std::filesystem::exists(source)) throw Error(ErrorKind::kNotFound, "image file missing for " + image_id);
    const bool thumb = req.has_param("thumb") && req.get_param_value("thumb") != "0";
    if (thumb) {
      ThumbnailCache cache(options_.thumb_cache);
      res.set_content(read_bytes(cache.get(image_id, source)), "image/jpeg");
    } else {
      res.set_content(read_bytes(source), content_type_for(source));
    }
    res.status = 200;
  }));

  if (options_.ui_dir) srv.set_mount_point("/", options_.ui_dir->string());
}

}  // namespace blindpair::curation
