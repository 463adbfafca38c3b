// Copyright 2026 The Pairrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pairrank/label_server.h"

#include <sys/socket.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "pairrank/errors.h"
#include "pairrank/text_format.h"

namespace pairrank {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& what) {
  SendJson(res, status, json{{"error", what}});
}

json ParseBody(const httplib::Request& req) {
  try {
    return req.body.empty() ? json::object() : json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T Field(const json& body, const char* key) {
  if (!body.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

CampaignManifest ManifestFromJson(const json& body) {
  if (!body.is_object()) throw DataError("manifest must be a JSON object");
  CampaignManifest m;
  m.campaign_id = Field<std::string>(body, "campaign_id");
  if (body.contains("rounds")) m.rounds = Field<int>(body, "rounds");
  if (body.contains("judges_per_pair")) {
    m.judges_per_pair = Field<int>(body, "judges_per_pair");
  }
  if (body.contains("seed")) m.seed = Field<std::uint64_t>(body, "seed");
  const json queries = Field<json>(body, "queries");
  if (!queries.is_array()) throw DataError("'queries' must be an array");
  for (const json& q : queries) {
    QueryItems items;
    items.query_id = Field<std::string>(q, "query_id");
    items.item_ids = Field<std::vector<std::string>>(q, "items");
    m.queries.push_back(std::move(items));
  }
  return m;
}

json StatusJson(const CampaignStatus& s) {
  json queries = json::array();
  for (const QueryStatus& q : s.queries) {
    queries.push_back({{"query_id", q.query_id},
                       {"active", q.active},
                       {"rounds_completed", q.rounds_completed}});
  }
  return {{"campaign_id", s.campaign_id},
          {"round", s.round},
          {"rounds", s.rounds},
          {"judges_per_pair", s.judges_per_pair},
          {"done", s.done},
          {"round_pairs", s.round_pairs},
          {"round_pairs_complete", s.round_pairs_complete},
          {"round_judgments", s.round_judgments},
          {"outstanding", s.outstanding},
          {"total_judgments", s.total_judgments},
          {"queries", queries}};
}

std::string ContentType(const fs::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

}  // namespace

struct LabelServer::Impl {
  LabelService& service;
  LabelServerOptions options;
  httplib::Server server;
  bool bound = false;

  Impl(LabelService& s, LabelServerOptions o) : service(s), options(std::move(o)) {}

  std::string Token(const httplib::Request& req, const json* body) const {
    const std::string auth = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (auth.rfind(kBearer, 0) == 0) return std::string(Trim(auth.substr(kBearer.size())));
    if (req.has_param("judge")) return req.get_param_value("judge");
    if (body != nullptr && body->contains("judge")) {
      return Field<std::string>(*body, "judge");
    }
    throw AccessError("missing judge token");
  }

  // Runs `fn` and maps library errors onto HTTP statuses.
  void Guard(httplib::Response& res, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const LookupError& e) {
      SendError(res, 404, e.what());
    } catch (const ConflictError& e) {
      SendError(res, 409, e.what());
    } catch (const ExpiredError& e) {
      SendError(res, 410, e.what());
    } catch (const AccessError& e) {
      SendError(res, 403, e.what());
    } catch (const DataError& e) {
      SendError(res, 400, e.what());
    } catch (const ConfigError& e) {
      SendError(res, 400, e.what());
    } catch (const std::exception& e) {
      SendError(res, 500, e.what());
    }
  }

  void Routes() {
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers",
                                 "Content-Type, Authorization"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server.Post("/campaigns", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      Guard(res, [&] {
        const CampaignManifest m = ManifestFromJson(ParseBody(req));
        service.CreateCampaign(m);
        SendJson(res, 201, StatusJson(service.Status(m.campaign_id)));
      });
    });

    server.Post("/judges", [this](const httplib::Request& req,
                                  httplib::Response& res) {
      Guard(res, [&] {
        const json body = ParseBody(req);
        const std::string wanted =
            body.contains("judge_id") ? Field<std::string>(body, "judge_id") : "";
        const JudgeRegistration r = service.RegisterJudge(wanted);
        SendJson(res, 201, {{"judge_id", r.judge_id}, {"token", r.token}});
      });
    });

    server.Get(R"(/campaigns/([^/]+)/next)", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
      Guard(res, [&] {
        const std::string campaign = req.matches[1];
        const std::string judge = service.JudgeForToken(Token(req, nullptr));
        const std::optional<Presentation> p =
            service.NextPresentation(campaign, judge);
        const CampaignStatus status = service.Status(campaign);
        json out = {{"round", status.round}, {"done", status.done}};
        if (!p) {
          out["presentation"] = nullptr;
        } else {
          out["presentation"] = {
              {"presentation_id", p->presentation_id},
              {"pair_id", p->pair_id},
              {"query_id", p->query_id},
              {"left_item", p->left_item},
              {"right_item", p->right_item},
              {"left_image", "/images/" + p->left_item},
              {"right_image", "/images/" + p->right_item},
              {"round", p->round}};
        }
        SendJson(res, 200, out);
      });
    });

    server.Post("/judgments", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      Guard(res, [&] {
        const json body = ParseBody(req);
        const std::string judge = service.JudgeForToken(Token(req, &body));
        const JudgmentRecord r = service.SubmitJudgment(
            Field<std::string>(body, "presentation_id"), judge,
            Field<int>(body, "label"));
        SendJson(res, 201, {{"pair_id", r.pair_id}, {"label", r.label}});
      });
    });

    server.Get(R"(/campaigns/([^/]+)/export)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
      Guard(res, [&] {
        res.set_content(service.Export(req.matches[1]), "text/plain");
      });
    });

    server.Get(R"(/campaigns/([^/]+)/status)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
      Guard(res, [&] { SendJson(res, 200, StatusJson(service.Status(req.matches[1]))); });
    });

    server.Get(R"(/images/([^/]+))", [this](const httplib::Request& req,
                                           httplib::Response& res) {
      Guard(res, [&] { ServeImage(req.matches[1], res); });
    });

    if (!options.ui_dir.empty() && !server.set_mount_point("/", options.ui_dir)) {
      throw IoError("cannot serve UI directory " + options.ui_dir);
    }
  }

  void ServeImage(const std::string& item_id, httplib::Response& res) {
    if (options.image_dir.empty()) throw LookupError("image serving is disabled");
    if (!IsValidId(item_id) || item_id.find('/') != std::string::npos ||
        item_id.find("..") != std::string::npos) {
      throw DataError("invalid item id");
    }
    const fs::path dir(options.image_dir);
    fs::path found;
    std::error_code ec;
    if (fs::is_regular_file(dir / item_id, ec)) {
      found = dir / item_id;
    } else {
      for (const fs::directory_entry& e : fs::directory_iterator(dir, ec)) {
        if (e.is_regular_file() && e.path().stem() == item_id) {
          found = e.path();
          break;
        }
      }
    }
    if (found.empty()) throw LookupError("no image for item '" + item_id + "'");
    res.set_content(ReadFile(found.string()), ContentType(found));
  }
};

LabelServer::LabelServer(LabelService& service, LabelServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->Routes();
}

LabelServer::~LabelServer() { Stop(); }

int LabelServer::Bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void LabelServer::Run() {
  if (!impl_->bound) throw ConfigError("LabelServer::Run called before Bind");
  impl_->server.listen_after_bind();
}

void LabelServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
  impl_->service.Flush();
}

void LabelServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace pairrank
