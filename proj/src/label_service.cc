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

#include "pairrank/label_service.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "pairrank/errors.h"
#include "pairrank/text_format.h"

namespace pairrank {
namespace fs = std::filesystem;

namespace {

constexpr char kJudgesLog[] = "judges.log";

// Campaign ids become file names and presentation id prefixes.
bool IsCampaignId(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string ManifestText(const CampaignManifest& manifest) {
  std::ostringstream out;
  WriteManifest(out, manifest);
  return out.str();
}

std::string EmptyJudgmentLog() {
  std::ostringstream out;
  WriteJudgments(out, {});
  return out.str();
}

}  // namespace

void ValidateManifest(const CampaignManifest& m) {
  if (!IsCampaignId(m.campaign_id)) {
    throw DataError("campaign id '" + m.campaign_id +
                    "' must be non-empty [A-Za-z0-9_-]");
  }
  if (m.rounds < 1) throw DataError("rounds must be >= 1");
  if (m.judges_per_pair < 1) throw DataError("judges_per_pair must be >= 1");
  if (m.queries.empty()) throw DataError("manifest lists no queries");
  std::set<std::string> queries;
  std::set<std::string> items;
  for (const QueryItems& q : m.queries) {
    CheckId(q.query_id, "query id");
    if (!queries.insert(q.query_id).second) {
      throw DataError("duplicate query '" + q.query_id + "'");
    }
    for (const std::string& item : q.item_ids) {
      CheckId(item, "item id in query '" + q.query_id + "'");
      if (!items.insert(item).second) {
        throw DataError("item '" + item + "' listed more than once");
      }
    }
  }
}

struct LabelService::Campaign {
  CampaignManifest manifest;
  std::vector<TournamentState> states;
  std::vector<bool> active;
  int round = 1;
  bool done = false;

  std::vector<PairSpec> round_pairs;
  std::unordered_map<std::string, std::size_t> pair_index;
  std::vector<int> stored;       // per round pair
  std::vector<int> outstanding;  // per round pair
  std::size_t round_judgments = 0;

  std::set<std::pair<std::string, std::string>> judged;  // (pair, judge)
  std::vector<JudgmentRecord> records;
  std::unordered_map<std::string, Presentation> presentations;
  std::set<std::string> submitted;
  std::set<std::string> expired;

  Rng rng{0};
  std::string log_path;
  std::ofstream log;
  mutable std::shared_mutex mu;

  explicit Campaign(const CampaignManifest& m, std::uint64_t seed)
      : manifest(m), rng(seed) {
    for (const QueryItems& q : m.queries) {
      states.emplace_back(q.query_id, q.item_ids,
                          QuerySeed(m.seed, q.query_id), m.rounds);
      active.push_back(q.item_ids.size() >= 2);
    }
    StartRound();
  }

  void StartRound() {
    round_pairs.clear();
    pair_index.clear();
    for (std::size_t q = 0; q < states.size(); ++q) {
      if (!active[q]) continue;
      try {
        for (PairSpec& p : NextRoundPairs(states[q])) {
          pair_index.emplace(p.pair_id, round_pairs.size());
          round_pairs.push_back(std::move(p));
        }
      } catch (const ExhaustionError&) {
        active[q] = false;
      }
    }
    stored.assign(round_pairs.size(), 0);
    outstanding.assign(round_pairs.size(), 0);
    round_judgments = 0;
    if (round_pairs.empty()) done = true;
  }

  void AdvanceRound() {
    for (TournamentState& state : states) {
      if (state.pending().empty()) continue;
      ApplyOutcomes(state, OutcomesFromJudgments(state.pending(), records));
    }
    presentations.clear();
    if (round >= manifest.rounds) {
      done = true;
      round_pairs.clear();
      pair_index.clear();
      stored.clear();
      outstanding.clear();
      return;
    }
    ++round;
    StartRound();
  }

  void Store(const JudgmentRecord& record, bool append) {
    ValidateJudgment(record);
    const auto it = pair_index.find(record.pair_id);
    if (it == pair_index.end()) {
      throw DataError("pair '" + record.pair_id +
                      "' is not part of the current round of campaign '" +
                      manifest.campaign_id + "'");
    }
    const PairSpec& pair = round_pairs[it->second];
    if (record.left_item != pair.left_item ||
        record.right_item != pair.right_item ||
        record.query_id != pair.query_id) {
      throw DataError("judgment for pair '" + record.pair_id +
                      "' does not match its items");
    }
    if (!judged.emplace(record.pair_id, record.judge_id).second) {
      throw ConflictError("judge '" + record.judge_id + "' already judged pair '" +
                          record.pair_id + "'");
    }
    records.push_back(record);
    ++stored[it->second];
    ++round_judgments;
    if (append && log.is_open()) {
      log << JudgmentLine(record) << "\n";
      log.flush();
      if (!log) throw IoError("cannot append to " + log_path);
    }
    const int quota = manifest.judges_per_pair;
    for (int n : stored) {
      if (n < quota) return;
    }
    AdvanceRound();
  }

  void ReleaseExpired(double now, double timeout) {
    for (auto it = presentations.begin(); it != presentations.end();) {
      if (now - it->second.issued_at > timeout) {
        --outstanding[pair_index.at(it->second.pair_id)];
        expired.insert(it->first);
        it = presentations.erase(it);
      } else {
        ++it;
      }
    }
  }
};

LabelService::LabelService(LabelServiceOptions options)
    : options_(std::move(options)) {
  if (!options_.clock) {
    options_.clock = [] {
      return std::chrono::duration<double>(
                 std::chrono::steady_clock::now().time_since_epoch())
          .count();
    };
  }
  if (!options_.wall_clock) {
    options_.wall_clock = [] {
      return static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch()).count());
    };
  }
  if (!(options_.presentation_timeout > 0.0)) {
    throw ConfigError("presentation timeout must be > 0");
  }
  if (options_.seed) {
    seed_ = *options_.seed;
  } else {
    std::random_device rd;
    seed_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  rng_ = Rng(MixSeed(seed_, 0x70c3u));
  if (!options_.log_dir.empty()) LoadLogDir();
}

LabelService::~LabelService() { Flush(); }

double LabelService::Now() const { return options_.clock(); }

std::string LabelService::RandomHex(std::size_t bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  while (out.size() < 2 * bytes) {
    std::uint64_t x = rng_.NextU64();
    for (int i = 0; i < 16 && out.size() < 2 * bytes; ++i, x >>= 4) {
      out += kDigits[x & 0xf];
    }
  }
  return out;
}

void LabelService::LoadLogDir() {
  std::error_code ec;
  fs::create_directories(options_.log_dir, ec);
  if (ec) throw IoError("cannot create " + options_.log_dir + ": " + ec.message());

  const fs::path judges = fs::path(options_.log_dir) / kJudgesLog;
  if (fs::exists(judges)) {
    std::ifstream in(judges);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::vector<std::string> f = SplitWhitespace(line);
      if (f.empty()) continue;
      if (f.size() != 2) {
        throw DataError(judges.string() + ":" + std::to_string(line_no) +
                        ": expected '<judge_id> <token>'");
      }
      judge_to_token_[f[0]] = f[1];
      token_to_judge_[f[1]] = f[0];
    }
  }

  std::vector<fs::path> manifests;
  for (const fs::directory_entry& entry : fs::directory_iterator(options_.log_dir)) {
    if (entry.path().extension() == ".manifest") manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  for (const fs::path& path : manifests) {
    AddCampaign(ReadManifestFile(path.string()), /*replay=*/true);
  }
}

void LabelService::AddCampaign(const CampaignManifest& manifest, bool replay) {
  ValidateManifest(manifest);
  auto campaign = std::make_unique<Campaign>(
      manifest, MixSeed(seed_, Fnv1a(manifest.campaign_id)));
  if (!options_.log_dir.empty()) {
    const fs::path dir(options_.log_dir);
    const std::string stem = manifest.campaign_id;
    campaign->log_path = (dir / (stem + ".judgments")).string();
    if (replay && fs::exists(campaign->log_path)) {
      const JudgmentParse parsed = ReadJudgmentsFile(campaign->log_path);
      for (const JudgmentRecord& record : parsed.records) {
        try {
          campaign->Store(record, /*append=*/false);
        } catch (const Error& e) {
          throw DataError(campaign->log_path + ": replay failed: " + e.what());
        }
      }
      // Fresh presentation ids after a restart, even with a fixed seed.
      campaign->rng = Rng(MixSeed(seed_ ^ Fnv1a(manifest.campaign_id),
                                  campaign->records.size() + 1));
    } else {
      if (!replay) WriteFile((dir / (stem + ".manifest")).string(), ManifestText(manifest));
      WriteFile(campaign->log_path, EmptyJudgmentLog());
    }
    campaign->log.open(campaign->log_path, std::ios::app);
    if (!campaign->log) throw IoError("cannot open " + campaign->log_path);
  }
  campaign_order_.push_back(manifest.campaign_id);
  campaigns_.emplace(manifest.campaign_id, std::move(campaign));
}

void LabelService::CreateCampaign(const CampaignManifest& manifest) {
  std::unique_lock lock(mu_);
  if (campaigns_.contains(manifest.campaign_id)) {
    throw ConflictError("campaign '" + manifest.campaign_id + "' already exists");
  }
  AddCampaign(manifest, /*replay=*/false);
}

void LabelService::EnsureCampaign(const CampaignManifest& manifest) {
  std::unique_lock lock(mu_);
  const auto it = campaigns_.find(manifest.campaign_id);
  if (it == campaigns_.end()) {
    AddCampaign(manifest, /*replay=*/false);
    return;
  }
  if (ManifestText(it->second->manifest) != ManifestText(manifest)) {
    throw ConflictError("campaign '" + manifest.campaign_id +
                        "' exists with a different manifest");
  }
}

bool LabelService::HasCampaign(const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  return campaigns_.contains(campaign_id);
}

std::vector<std::string> LabelService::CampaignIds() const {
  std::shared_lock lock(mu_);
  return campaign_order_;
}

LabelService::Campaign& LabelService::Find(const std::string& campaign_id) const {
  const auto it = campaigns_.find(campaign_id);
  if (it == campaigns_.end()) {
    throw LookupError("unknown campaign '" + campaign_id + "'");
  }
  return *it->second;
}

JudgeRegistration LabelService::RegisterJudge(const std::string& judge_id) {
  std::unique_lock lock(mu_);
  std::string id = judge_id;
  if (id.empty()) {
    std::size_t n = judge_to_token_.size() + 1;
    do {
      id = "j" + std::to_string(n++);
    } while (judge_to_token_.contains(id));
  } else {
    CheckId(id, "judge id");
    if (judge_to_token_.contains(id)) {
      throw ConflictError("judge '" + id + "' already registered");
    }
  }
  std::string token;
  do {
    token = RandomHex(16);
  } while (token_to_judge_.contains(token));
  if (!options_.log_dir.empty()) {
    const fs::path path = fs::path(options_.log_dir) / kJudgesLog;
    std::ofstream out(path, std::ios::app);
    out << id << " " << token << "\n";
    out.flush();
    if (!out) throw IoError("cannot append to " + path.string());
  }
  judge_to_token_[id] = token;
  token_to_judge_[token] = id;
  return {id, token};
}

std::string LabelService::JudgeForToken(const std::string& token) const {
  std::shared_lock lock(mu_);
  const auto it = token_to_judge_.find(token);
  if (it == token_to_judge_.end()) throw LookupError("unknown judge token");
  return it->second;
}

bool LabelService::HasJudge(const std::string& judge_id) const {
  std::shared_lock lock(mu_);
  return judge_to_token_.contains(judge_id);
}

std::optional<Presentation> LabelService::NextPresentation(
    const std::string& campaign_id, const std::string& judge_id) {
  std::shared_lock lock(mu_);
  if (!judge_to_token_.contains(judge_id)) {
    throw LookupError("unknown judge '" + judge_id + "'");
  }
  Campaign& c = Find(campaign_id);
  std::unique_lock campaign_lock(c.mu);
  const double now = Now();
  c.ReleaseExpired(now, options_.presentation_timeout);
  if (c.done) return std::nullopt;

  std::set<std::string> showing;
  for (const auto& [id, p] : c.presentations) {
    if (p.judge_id == judge_id) showing.insert(p.pair_id);
  }
  std::optional<std::size_t> best;
  int best_load = 0;
  const int quota = c.manifest.judges_per_pair;
  for (std::size_t i = 0; i < c.round_pairs.size(); ++i) {
    const int load = c.stored[i] + c.outstanding[i];
    if (load >= quota) continue;
    const std::string& pair_id = c.round_pairs[i].pair_id;
    if (showing.contains(pair_id) || c.judged.contains({pair_id, judge_id})) {
      continue;
    }
    if (!best || load < best_load) {
      best = i;
      best_load = load;
    }
  }
  if (!best) return std::nullopt;

  const PairSpec& pair = c.round_pairs[*best];
  Presentation p;
  do {
    std::uint64_t x = c.rng.NextU64();
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string hex;
    for (int k = 0; k < 16; ++k, x >>= 4) hex += kDigits[x & 0xf];
    p.presentation_id = campaign_id + "." + hex;
  } while (c.presentations.contains(p.presentation_id) ||
           c.submitted.contains(p.presentation_id) ||
           c.expired.contains(p.presentation_id));
  p.campaign_id = campaign_id;
  p.pair_id = pair.pair_id;
  p.query_id = pair.query_id;
  p.flipped = c.rng.Coin();
  p.left_item = p.flipped ? pair.right_item : pair.left_item;
  p.right_item = p.flipped ? pair.left_item : pair.right_item;
  p.judge_id = judge_id;
  p.round = c.round;
  p.issued_at = now;
  ++c.outstanding[*best];
  c.presentations.emplace(p.presentation_id, p);
  return p;
}

JudgmentRecord LabelService::SubmitJudgment(const std::string& presentation_id,
                                            const std::string& judge_id,
                                            int raw_label) {
  const auto dot = presentation_id.rfind('.');
  if (dot == std::string::npos) {
    throw LookupError("unknown presentation '" + presentation_id + "'");
  }
  std::shared_lock lock(mu_);
  Campaign& c = Find(presentation_id.substr(0, dot));
  std::unique_lock campaign_lock(c.mu);
  if (c.submitted.contains(presentation_id)) {
    throw ConflictError("presentation '" + presentation_id +
                        "' was already submitted");
  }
  c.ReleaseExpired(Now(), options_.presentation_timeout);
  if (c.expired.contains(presentation_id)) {
    throw ExpiredError("presentation '" + presentation_id + "' expired");
  }
  const auto it = c.presentations.find(presentation_id);
  if (it == c.presentations.end()) {
    throw LookupError("unknown presentation '" + presentation_id + "'");
  }
  const Presentation& p = it->second;
  if (p.judge_id != judge_id) {
    throw AccessError("presentation '" + presentation_id +
                      "' was issued to another judge");
  }
  if (raw_label < 0 || raw_label >= kNumFiveWayLabels) {
    throw DataError("label must be in 0..4, got " + std::to_string(raw_label));
  }
  const PairSpec& pair = c.round_pairs[c.pair_index.at(p.pair_id)];
  const JudgmentRecord record =
      MakeJudgment(pair.pair_id, pair.query_id, pair.left_item, pair.right_item,
                   judge_id, raw_label, p.flipped, options_.wall_clock());
  --c.outstanding[c.pair_index.at(p.pair_id)];
  c.presentations.erase(it);
  c.submitted.insert(presentation_id);
  c.Store(record, /*append=*/true);
  return record;
}

std::string LabelService::Export(const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  const Campaign& c = Find(campaign_id);
  std::shared_lock campaign_lock(c.mu);
  std::ostringstream out;
  WriteJudgments(out, c.records);
  return out.str();
}

void LabelService::ExportFile(const std::string& campaign_id,
                              const std::string& path) const {
  WriteFile(path, Export(campaign_id));
}

std::vector<JudgmentRecord> LabelService::Judgments(
    const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  const Campaign& c = Find(campaign_id);
  std::shared_lock campaign_lock(c.mu);
  return c.records;
}

CampaignStatus LabelService::Status(const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  const Campaign& c = Find(campaign_id);
  std::shared_lock campaign_lock(c.mu);
  CampaignStatus s;
  s.campaign_id = campaign_id;
  s.round = c.round;
  s.rounds = c.manifest.rounds;
  s.judges_per_pair = c.manifest.judges_per_pair;
  s.done = c.done;
  s.round_pairs = c.round_pairs.size();
  for (std::size_t i = 0; i < c.round_pairs.size(); ++i) {
    if (c.stored[i] >= c.manifest.judges_per_pair) ++s.round_pairs_complete;
  }
  s.round_judgments = c.done ? 0 : c.round_judgments;
  s.outstanding = c.presentations.size();
  s.total_judgments = c.records.size();
  for (std::size_t q = 0; q < c.states.size(); ++q) {
    s.queries.push_back({c.states[q].query_id(), c.active[q] && !c.done,
                         c.states[q].rounds_completed()});
  }
  return s;
}

CampaignManifest LabelService::Manifest(const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  return Find(campaign_id).manifest;
}

std::vector<PairSpec> LabelService::CurrentPairs(
    const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  const Campaign& c = Find(campaign_id);
  std::shared_lock campaign_lock(c.mu);
  return c.round_pairs;
}

std::vector<TournamentState> LabelService::Tournaments(
    const std::string& campaign_id) const {
  std::shared_lock lock(mu_);
  const Campaign& c = Find(campaign_id);
  std::shared_lock campaign_lock(c.mu);
  return c.states;
}

void LabelService::Flush() {
  std::shared_lock lock(mu_);
  for (auto& [id, c] : campaigns_) {
    std::unique_lock campaign_lock(c->mu);
    if (c->log.is_open()) c->log.flush();
  }
}

}  // namespace pairrank
