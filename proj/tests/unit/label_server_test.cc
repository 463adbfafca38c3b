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


#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>

#include "pairrank/dataio.h"
#include "pairrank/errors.h"
#include "pairrank/label_server.h"
#include "pairrank/label_service.h"

namespace pairrank {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    image_dir_ = fs::temp_directory_path() / ("pairrank_img_" + std::to_string(::getpid()));
    fs::create_directories(image_dir_);
    std::ofstream(image_dir_ / "i0.png") << "PNGDATA";
    std::ofstream(image_dir_ / "i1.jpg") << "JPGDATA";
    LabelServiceOptions o;
    o.seed = 5;
    o.clock = [this] { return now_; };
    o.presentation_timeout = 100.0;
    service_ = std::make_unique<LabelService>(o);
    server_ = std::make_unique<LabelServer>(*service_, LabelServerOptions{image_dir_.string(), ""});
    port_ = server_->Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->Run(); });
    server_->WaitUntilReady();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    server_->Stop();
    thread_.join();
    fs::remove_all(image_dir_);
  }

  httplib::Result PostJson(const std::string& path, const json& body,
                           const std::string& token = "") {
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    return client_->Post(path, headers, body.dump(), "application/json");
  }

  json CreateCampaign() {
    const json manifest = {{"campaign_id", "c"},
                           {"rounds", 2},
                           {"judges_per_pair", 2},
                           {"seed", 3},
                           {"queries", {{{"query_id", "q"}, {"items", {"i0", "i1", "i2", "i3"}}}}}};
    auto res = PostJson("/campaigns", manifest);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 201) << res->body;
    return json::parse(res->body);
  }

  std::string Register(const std::string& id = "") {
    auto res = PostJson("/judges", id.empty() ? json::object() : json{{"judge_id", id}});
    EXPECT_EQ(res->status, 201) << res->body;
    return json::parse(res->body)["token"].get<std::string>();
  }

  json Next(const std::string& token) {
    auto res = client_->Get("/campaigns/c/next?judge=" + token);
    EXPECT_EQ(res->status, 200) << res->body;
    return json::parse(res->body);
  }

  fs::path image_dir_;
  double now_ = 0.0;
  std::unique_ptr<LabelService> service_;
  std::unique_ptr<LabelServer> server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServerTest, CampaignLifecycle) {
  const json status = CreateCampaign();
  EXPECT_EQ(status["campaign_id"], "c");
  EXPECT_EQ(status["round"], 1);
  EXPECT_EQ(status["round_pairs"], 2);

  const std::string a = Register("ann");
  const std::string b = Register();
  const json next = Next(a);
  ASSERT_FALSE(next["presentation"].is_null());
  const json p = next["presentation"];
  EXPECT_EQ(p["left_image"], "/images/" + p["left_item"].get<std::string>());
  EXPECT_EQ(p["round"], 1);

  auto res = PostJson("/judgments", {{"presentation_id", p["presentation_id"]}, {"label", 0}}, a);
  ASSERT_EQ(res->status, 201) << res->body;
  const json ack = json::parse(res->body);
  EXPECT_EQ(ack["pair_id"], p["pair_id"]);
  const bool flipped = service_->Judgments("c")[0].presented_flipped;
  EXPECT_EQ(ack["label"], flipped ? 4 : 0);

  // Token in the body works too; everything else of round 1 gets judged.
  for (const std::string& token : {a, b, b}) {
    const json n = Next(token);
    if (n["presentation"].is_null()) continue;
    res = client_->Post("/judgments",
                        json{{"presentation_id", n["presentation"]["presentation_id"]},
                             {"label", 2},
                             {"judge", token}}
                            .dump(),
                        "application/json");
    EXPECT_EQ(res->status, 201) << res->body;
  }
  res = client_->Get("/campaigns/c/status");
  ASSERT_EQ(res->status, 200);
  const json st = json::parse(res->body);
  EXPECT_EQ(st["round"], 2);
  EXPECT_EQ(st["total_judgments"], 4);

  res = client_->Get("/campaigns/c/export");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(res->body, service_->Export("c"));
  std::istringstream in(res->body);
  EXPECT_EQ(ReadJudgments(in).records.size(), 4u);
}

TEST_F(ServerTest, ErrorStatuses) {
  CreateCampaign();
  EXPECT_EQ(PostJson("/campaigns", {{"campaign_id", "c"}, {"queries", json::array({{{"query_id", "q"}, {"items", {"x", "y"}}}})}})->status, 409);
  EXPECT_EQ(PostJson("/campaigns", {{"rounds", 2}})->status, 400);
  EXPECT_EQ(client_->Post("/campaigns", "{not json", "application/json")->status, 400);

  const std::string a = Register("ann");
  const std::string b = Register("bob");
  EXPECT_EQ(PostJson("/judges", {{"judge_id", "ann"}})->status, 409);
  EXPECT_EQ(client_->Get("/campaigns/zz/next?judge=" + a)->status, 404);
  EXPECT_EQ(client_->Get("/campaigns/c/next?judge=bogus")->status, 404);
  EXPECT_EQ(client_->Get("/campaigns/c/next")->status, 403);

  const json p = Next(a)["presentation"];
  const std::string id = p["presentation_id"];
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", id}, {"label", 1}}, b)->status, 403);
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", id}, {"label", 9}}, a)->status, 400);
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", id}, {"label", "x"}}, a)->status, 400);
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", "c.zzz"}, {"label", 1}}, a)->status, 404);
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", id}, {"label", 1}}, a)->status, 201);
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", id}, {"label", 1}}, a)->status, 409);

  const json late = Next(a)["presentation"];
  now_ = 1000.0;
  EXPECT_EQ(PostJson("/judgments", {{"presentation_id", late["presentation_id"]}, {"label", 1}}, a)->status,
            410);
  EXPECT_EQ(client_->Get("/campaigns/zz/status")->status, 404);
  EXPECT_EQ(client_->Get("/campaigns/zz/export")->status, 404);
}

TEST_F(ServerTest, ServesImagesByItemId) {
  auto res = client_->Get("/images/i0");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "PNGDATA");
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/png");
  res = client_->Get("/images/i1.jpg");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "image/jpeg");
  EXPECT_EQ(client_->Get("/images/i9")->status, 404);
  EXPECT_NE(client_->Get("/images/..%2F..%2Fetc%2Fpasswd")->status, 200);
  EXPECT_NE(client_->Get("/images/..")->status, 200);
}

TEST_F(ServerTest, CorsPreflight) {
  auto res = client_->Options("/judgments");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(ServerTest, BusyPortIsReported) {
  LabelService other;
  LabelServer second(other);
  EXPECT_THROW(second.Bind("127.0.0.1", port_), IoError);
}

TEST(ServerUiTest, MountsStaticDirectory) {
  const fs::path ui = fs::temp_directory_path() / ("pairrank_ui_" + std::to_string(::getpid()));
  fs::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>ui</html>";
  LabelService service;
  LabelServer server(service, LabelServerOptions{"", ui.string()});
  const int port = server.Bind("127.0.0.1", 0);
  std::thread t([&] { server.Run(); });
  server.WaitUntilReady();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "<html>ui</html>");
  EXPECT_EQ(client.Get("/images/x")->status, 404);
  server.Stop();
  t.join();
  fs::remove_all(ui);
}

}  // namespace
}  // namespace pairrank
