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

#ifndef PAIRRANK_TOURNAMENT_H_
#define PAIRRANK_TOURNAMENT_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pairrank/dataio.h"

namespace pairrank {

// One emitted pair. left/right is the canonical presentation orientation.
struct PairSpec {
  std::string pair_id;
  std::string query_id;
  std::string left_item;
  std::string right_item;
};

// Majority label of a finished pair; nullopt when no label reached a
// strict majority (scored like "equal").
struct RoundOutcome {
  std::string pair_id;
  std::optional<int> majority_label;
};

// Points for (left, right) under a majority label: 3 for "better", 1 for
// "slightly better", 0 otherwise.
std::pair<double, double> PointAwards(std::optional<int> majority_label);

// "<query>:<round>:<index>", round 1-based.
std::string MakePairId(const std::string& query_id, int round, std::size_t index);

// Swiss-system bookkeeping for the items of one query.
class TournamentState {
 public:
  TournamentState(std::string query_id, std::vector<std::string> item_ids,
                  std::uint64_t seed, int max_rounds = 5);

  const std::string& query_id() const { return query_id_; }
  const std::vector<std::string>& items() const { return items_; }
  int rounds_completed() const { return rounds_completed_; }
  int max_rounds() const { return max_rounds_; }
  std::uint64_t seed() const { return seed_; }

  double points(const std::string& item_id) const;
  const std::vector<double>& all_points() const { return points_; }

  bool HasPair(const std::string& a, const std::string& b) const;
  std::size_t num_pairs_emitted() const { return used_.size(); }

  // Pairs handed out by NextRoundPairs and awaiting ApplyOutcomes.
  const std::vector<PairSpec>& pending() const { return pending_; }

  // Pairing order for the next round: items by points, highest first; ties
  // in a seeded shuffle that depends on the round. Returns item indices.
  std::vector<std::size_t> PairingOrder() const;

  // Test hook: mark a pair as already used.
  void MarkUsed(std::size_t a, std::size_t b);
  void SetPoints(std::size_t item, double points);

 private:
  friend std::vector<PairSpec> NextRoundPairs(TournamentState& state);
  friend void ApplyOutcomes(TournamentState& state,
                            const std::vector<RoundOutcome>& outcomes);

  std::string query_id_;
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> points_;
  std::set<std::pair<std::size_t, std::size_t>> used_;
  std::vector<PairSpec> pending_;
  std::uint64_t seed_;
  int max_rounds_;
  int rounds_completed_ = 0;
};

// Pairing of an ordered list given a "may pair" predicate: walking the
// order, each unmatched item takes the earliest later partner that still
// allows the rest to be matched; for an odd count the bye goes to the
// latest item in the order that allows a full matching. Positions refer
// to `order`. Returns nullopt when no duplicate-free matching exists.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // positions
  std::optional<std::size_t> bye;                          // position
};
std::optional<Matching> MatchInOrder(
    std::size_t count,
    const std::function<bool(std::size_t, std::size_t)>& may_pair);

// Emits floor(N/2) pairs for the next round and records them as pending
// and used. The higher-ranked item of each pair is presented on the left.
// Throws DomainError with fewer than two items, with outcomes of the
// previous round still pending, or after max_rounds; ExhaustionError
// (naming the query and score group) when every remaining pairing repeats
// an earlier pair.
std::vector<PairSpec> NextRoundPairs(TournamentState& state);

// Scores the pending round and advances the round counter. Throws
// DataError unless `outcomes` covers exactly the pending pairs.
void ApplyOutcomes(TournamentState& state,
                   const std::vector<RoundOutcome>& outcomes);

// Majority outcome of each pair in `pairs`, computed from `records`.
std::vector<RoundOutcome> OutcomesFromJudgments(
    const std::vector<PairSpec>& pairs,
    const std::vector<JudgmentRecord>& records);

// Supplies judgments for one round of one query.
using LabelSource = std::function<std::vector<JudgmentRecord>(
    const std::vector<PairSpec>& pairs)>;

struct QueryItems {
  std::string query_id;
  std::vector<std::string> item_ids;
};

// Runs `rounds` rounds per query, labelling each round through `source`,
// and returns every judgment in order. Queries with fewer than two items
// are skipped.
std::vector<JudgmentRecord> RunCampaign(const std::vector<QueryItems>& queries,
                                        int rounds, const LabelSource& source,
                                        std::uint64_t seed);

// Per-query seed derived from a campaign seed.
std::uint64_t QuerySeed(std::uint64_t campaign_seed, const std::string& query_id);

// Groups item ids by query in first-appearance order.
std::vector<QueryItems> GroupByQuery(const ItemTable& items);

// Rebuilds tournament states by replaying the rounds present in `records`
// (matched by pair id) and returns the states with the first round that has
// no judgments already drawn into pending(). States whose next round cannot
// be drawn (max rounds reached, exhausted) are returned without pending
// pairs.
std::vector<TournamentState> ReplayCampaign(
    const std::vector<QueryItems>& queries, std::uint64_t seed, int max_rounds,
    const std::vector<JudgmentRecord>& records);

// Campaign manifest: the line-oriented file that seeds a labeling campaign.
//
//   #pairrank-manifest v1
//   campaign <id>
//   rounds <n>
//   judges_per_pair <n>
//   seed <n>
//   query <query_id> <item_id> <item_id> ...
struct CampaignManifest {
  std::string campaign_id;
  int rounds = 2;
  int judges_per_pair = 5;
  std::uint64_t seed = 0;
  std::vector<QueryItems> queries;
};

inline constexpr char kManifestPragma[] = "#pairrank-manifest v1";

// Throws DataError with a "source:line:" prefix on any malformed line.
CampaignManifest ParseManifest(std::istream& in,
                               const std::string& source = "<manifest>");
CampaignManifest ReadManifestFile(const std::string& path);
void WriteManifest(std::ostream& out, const CampaignManifest& manifest);

inline constexpr char kPairsPragma[] = "#pairrank-pairs v1";
void WritePairs(std::ostream& out, const std::vector<PairSpec>& pairs);

}  // namespace pairrank

#endif  // PAIRRANK_TOURNAMENT_H_
