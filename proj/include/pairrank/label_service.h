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

#ifndef PAIRRANK_LABEL_SERVICE_H_
#define PAIRRANK_LABEL_SERVICE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairrank/dataio.h"
#include "pairrank/rng.h"
#include "pairrank/tournament.h"

namespace pairrank {

// One pair handed to one judge. left_item/right_item are in on-screen
// order, i.e. already swapped when `flipped` is set.
struct Presentation {
  std::string presentation_id;  // "<campaign>.<hex>"
  std::string campaign_id;
  std::string pair_id;
  std::string query_id;
  std::string left_item;
  std::string right_item;
  bool flipped = false;
  std::string judge_id;
  int round = 0;
  double issued_at = 0.0;  // service clock, seconds
};

struct QueryStatus {
  std::string query_id;
  bool active = false;  // still drawing rounds
  int rounds_completed = 0;
};

struct CampaignStatus {
  std::string campaign_id;
  int round = 0;  // 1-based; stays at the last round once done
  int rounds = 0;
  int judges_per_pair = 0;
  bool done = false;
  std::size_t round_pairs = 0;
  std::size_t round_pairs_complete = 0;  // pairs at quota
  std::size_t round_judgments = 0;
  std::size_t outstanding = 0;  // presentations awaiting a judgment
  std::size_t total_judgments = 0;
  std::vector<QueryStatus> queries;
};

struct JudgeRegistration {
  std::string judge_id;
  std::string token;
};

struct LabelServiceOptions {
  // Directory holding "<campaign>.manifest", "<campaign>.judgments" and
  // "judges.log". Existing files are replayed at construction. Empty keeps
  // everything in memory.
  std::string log_dir;
  double presentation_timeout = 600.0;  // seconds
  // Seeds flip coins, tokens and presentation ids; nullopt draws from
  // std::random_device.
  std::optional<std::uint64_t> seed;
  std::function<double()> clock;              // monotonic seconds
  std::function<std::int64_t()> wall_clock;   // record timestamps
};

// Labeling campaigns over Swiss tournaments. Each campaign serializes its
// mutations behind its own lock; status and export take a shared lock and
// see a consistent snapshot.
class LabelService {
 public:
  explicit LabelService(LabelServiceOptions options = {});
  ~LabelService();
  LabelService(const LabelService&) = delete;
  LabelService& operator=(const LabelService&) = delete;

  // Throws DataError for an invalid manifest, ConflictError when the id is
  // taken, IoError when the log directory is not writable.
  void CreateCampaign(const CampaignManifest& manifest);
  // As CreateCampaign, but an existing campaign with an identical manifest
  // is accepted (restarts replay it instead).
  void EnsureCampaign(const CampaignManifest& manifest);
  bool HasCampaign(const std::string& campaign_id) const;
  std::vector<std::string> CampaignIds() const;

  // Empty `judge_id` picks "j<n>". Throws ConflictError for a taken id.
  JudgeRegistration RegisterJudge(const std::string& judge_id = "");
  // Throws LookupError for unknown tokens.
  std::string JudgeForToken(const std::string& token) const;
  bool HasJudge(const std::string& judge_id) const;

  // A pair of the current round that still needs judgments and that this
  // judge has neither judged nor been shown. nullopt when there is none.
  // Throws LookupError for an unknown campaign or judge.
  std::optional<Presentation> NextPresentation(const std::string& campaign_id,
                                               const std::string& judge_id);

  // Stores the canonical record for a presentation and, when this judgment
  // completes the round, scores it and draws the next one. Throws
  // LookupError (unknown presentation), AccessError (issued to another
  // judge), ConflictError (already submitted), ExpiredError (timed out),
  // DataError (label outside 0..4).
  JudgmentRecord SubmitJudgment(const std::string& presentation_id,
                                const std::string& judge_id, int raw_label);

  // Stored judgments in the dataio text format, in submission order.
  std::string Export(const std::string& campaign_id) const;
  void ExportFile(const std::string& campaign_id, const std::string& path) const;
  std::vector<JudgmentRecord> Judgments(const std::string& campaign_id) const;

  CampaignStatus Status(const std::string& campaign_id) const;
  CampaignManifest Manifest(const std::string& campaign_id) const;
  std::vector<PairSpec> CurrentPairs(const std::string& campaign_id) const;
  std::vector<TournamentState> Tournaments(const std::string& campaign_id) const;

  // Flushes every open judgment log.
  void Flush();

 private:
  struct Campaign;

  Campaign& Find(const std::string& campaign_id) const;
  void AddCampaign(const CampaignManifest& manifest, bool replay);
  void LoadLogDir();
  double Now() const;
  std::string RandomHex(std::size_t bytes);

  LabelServiceOptions options_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::unique_ptr<Campaign>> campaigns_;
  std::vector<std::string> campaign_order_;
  std::unordered_map<std::string, std::string> token_to_judge_;
  std::unordered_map<std::string, std::string> judge_to_token_;
  std::uint64_t seed_ = 0;
  Rng rng_{0};  // guarded by mu_
};

// Throws DataError describing the first problem: bad ids, non-positive
// rounds or quota, duplicate queries or items.
void ValidateManifest(const CampaignManifest& manifest);

}  // namespace pairrank

#endif  // PAIRRANK_LABEL_SERVICE_H_
