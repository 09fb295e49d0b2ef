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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "blindpair/curation.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace blindpair::curation {

struct ServiceOptions {
  std::filesystem::path corpus_root;
  std::filesystem::path thumb_cache;        // defaults to <tmp>/blindpair-thumbs
  std::optional<std::filesystem::path> ui_dir;  // static bundle served at /
  std::size_t default_page_size = 50;
};

// JSON document for one pair as returned by the list and detail endpoints.
nlohmann::ordered_json pair_view_json(const PairView& v);

// Routes:
//   GET /api/health
//   GET /api/pairs?page=&size=&sort=gap_desc|index_asc&status=none|draft|accepted|rejected
//   GET /api/pairs/{id}
//   PUT /api/pairs/{id}/annotation
//   GET /api/export
//   GET /img/{image_id}[?thumb=1]
class HttpService {
 public:
  HttpService(CurationStore& store, ServiceOptions options);
  ~HttpService();

  // Binds and returns the bound port (pass 0 for an ephemeral port).
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void listen();
  void stop();

 private:
  void install_routes();

  CurationStore& store_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace blindpair::curation
