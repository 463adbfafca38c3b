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

#ifndef PAIRRANK_LABEL_SERVER_H_
#define PAIRRANK_LABEL_SERVER_H_

#include <memory>
#include <string>

#include "pairrank/label_service.h"

namespace pairrank {

struct LabelServerOptions {
  std::string image_dir;  // GET /images/{item_id}; empty disables
  std::string ui_dir;     // static files mounted at /; empty disables
};

// JSON-over-HTTP front end for a LabelService:
//
//   POST /campaigns               manifest JSON -> campaign status
//   POST /judges                  {"judge_id"?} -> {"judge_id", "token"}
//   GET  /campaigns/{id}/next     ?judge=<token> -> {"presentation": ... | null}
//   POST /judgments               {"presentation_id", "label", "judge"?}
//   GET  /campaigns/{id}/export   judgments in the dataio text format
//   GET  /campaigns/{id}/status
//   GET  /images/{item_id}
//
// Judges authenticate with their token, either as "Authorization: Bearer"
// or as the `judge` query/body field.
class LabelServer {
 public:
  LabelServer(LabelService& service, LabelServerOptions options = {});
  ~LabelServer();
  LabelServer(const LabelServer&) = delete;
  LabelServer& operator=(const LabelServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws IoError when
  // the address cannot be bound.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Requires a successful Bind.
  void Run();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pairrank

#endif  // PAIRRANK_LABEL_SERVER_H_
