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

#include "pairrank/tournament.h"

#include <algorithm>
#include <bit>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "pairrank/errors.h"
#include "pairrank/rng.h"
#include "pairrank/text_format.h"

namespace pairrank {

std::pair<double, double> PointAwards(std::optional<int> majority_label) {
  if (!majority_label) return {0.0, 0.0};
  switch (*majority_label) {
    case kLeftBetter:
      return {3.0, 0.0};
    case kLeftSlightlyBetter:
      return {1.0, 0.0};
    case kRightSlightlyBetter:
      return {0.0, 1.0};
    case kRightBetter:
      return {0.0, 3.0};
    default:
      return {0.0, 0.0};
  }
}

std::string MakePairId(const std::string& query_id, int round,
                       std::size_t index) {
  return query_id + ":" + std::to_string(round) + ":" + std::to_string(index);
}

TournamentState::TournamentState(std::string query_id,
                                 std::vector<std::string> item_ids,
                                 std::uint64_t seed, int max_rounds)
    : query_id_(std::move(query_id)),
      items_(std::move(item_ids)),
      points_(items_.size(), 0.0),
      seed_(seed),
      max_rounds_(max_rounds) {
  if (items_.size() > 64) {
    throw DomainError("query '" + query_id_ + "' has " +
                      std::to_string(items_.size()) +
                      " items; at most 64 are supported");
  }
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (!index_.emplace(items_[i], i).second) {
      throw DataError("query '" + query_id_ + "' lists item '" + items_[i] +
                      "' twice");
    }
  }
}

double TournamentState::points(const std::string& item_id) const {
  auto it = index_.find(item_id);
  if (it == index_.end()) {
    throw LookupError("item '" + item_id + "' is not in query '" + query_id_ +
                      "'");
  }
  return points_[it->second];
}

bool TournamentState::HasPair(const std::string& a, const std::string& b) const {
  auto ia = index_.find(a);
  auto ib = index_.find(b);
  if (ia == index_.end() || ib == index_.end()) return false;
  return used_.contains(std::minmax(ia->second, ib->second));
}

void TournamentState::MarkUsed(std::size_t a, std::size_t b) {
  used_.insert(std::minmax(a, b));
}

void TournamentState::SetPoints(std::size_t item, double points) {
  points_[item] = points;
}

std::vector<std::size_t> TournamentState::PairingOrder() const {
  std::vector<std::size_t> order(items_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points_[a] > points_[b];
  });
  Rng rng(MixSeed(seed_, static_cast<std::uint64_t>(rounds_completed_ + 1)));
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() && points_[order[end]] == points_[order[begin]]) {
      ++end;
    }
    rng.Shuffle(std::span<std::size_t>(order.data() + begin, end - begin));
    begin = end;
  }
  return order;
}

namespace {

class OrderMatcher {
 public:
  OrderMatcher(std::size_t count,
               const std::function<bool(std::size_t, std::size_t)>& may_pair)
      : count_(count), may_pair_(may_pair) {}

  // Matches every position in `mask`; appends pairs on success.
  bool Solve(std::uint64_t mask,
             std::vector<std::pair<std::size_t, std::size_t>>& out) {
    if (mask == 0) return true;
    if (failed_.contains(mask)) return false;
    const std::size_t first = static_cast<std::size_t>(std::countr_zero(mask));
    const std::uint64_t rest = mask & ~(std::uint64_t{1} << first);
    for (std::size_t q = first + 1; q < count_; ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      if ((rest & bit) == 0 || !may_pair_(first, q)) continue;
      out.emplace_back(first, q);
      if (Solve(rest & ~bit, out)) return true;
      out.pop_back();
    }
    failed_.insert(mask);
    return false;
  }

 private:
  std::size_t count_;
  const std::function<bool(std::size_t, std::size_t)>& may_pair_;
  std::unordered_set<std::uint64_t> failed_;
};

}  // namespace

std::optional<Matching> MatchInOrder(
    std::size_t count,
    const std::function<bool(std::size_t, std::size_t)>& may_pair) {
  if (count > 64) throw DomainError("at most 64 items can be matched");
  const std::uint64_t all =
      count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
  OrderMatcher matcher(count, may_pair);
  Matching result;
  if (count % 2 == 0) {
    if (matcher.Solve(all, result.pairs)) return result;
    return std::nullopt;
  }
  for (std::size_t bye = count; bye-- > 0;) {
    result.pairs.clear();
    if (matcher.Solve(all & ~(std::uint64_t{1} << bye), result.pairs)) {
      result.bye = bye;
      return result;
    }
  }
  return std::nullopt;
}

std::vector<PairSpec> NextRoundPairs(TournamentState& state) {
  const std::size_t n = state.items_.size();
  if (n < 2) {
    throw DomainError("query '" + state.query_id_ +
                      "' needs at least two items to pair");
  }
  if (!state.pending_.empty()) {
    throw DomainError("query '" + state.query_id_ +
                      "': outcomes of the current round are still pending");
  }
  if (state.rounds_completed_ >= state.max_rounds_) {
    throw DomainError("query '" + state.query_id_ + "' already played " +
                      std::to_string(state.max_rounds_) + " rounds");
  }
  const std::vector<std::size_t> order = state.PairingOrder();
  auto may_pair = [&](std::size_t p, std::size_t q) {
    return !state.used_.contains(std::minmax(order[p], order[q]));
  };
  const std::optional<Matching> matching = MatchInOrder(n, may_pair);
  const int round = state.rounds_completed_ + 1;
  if (!matching) {
    // Name the highest score group containing an item with no fresh
    // partner; fall back to the top group.
    double group = state.points_[order.front()];
    for (std::size_t p = 0; p < n; ++p) {
      bool any = false;
      for (std::size_t q = 0; q < n && !any; ++q) {
        any = q != p && may_pair(std::min(p, q), std::max(p, q));
      }
      if (!any) {
        group = state.points_[order[p]];
        break;
      }
    }
    throw ExhaustionError("query '" + state.query_id_ + "' round " +
                          std::to_string(round) +
                          ": every remaining pairing repeats an earlier pair "
                          "(score group " + FormatDouble(group) + ")");
  }
  std::vector<PairSpec> pairs;
  for (const auto& [p, q] : matching->pairs) {
    const std::size_t left = order[p];
    const std::size_t right = order[q];
    state.used_.insert(std::minmax(left, right));
    pairs.push_back({MakePairId(state.query_id_, round, pairs.size()),
                     state.query_id_, state.items_[left], state.items_[right]});
  }
  state.pending_ = pairs;
  return pairs;
}

void ApplyOutcomes(TournamentState& state,
                   const std::vector<RoundOutcome>& outcomes) {
  std::map<std::string, const RoundOutcome*> by_id;
  for (const RoundOutcome& outcome : outcomes) {
    if (!by_id.emplace(outcome.pair_id, &outcome).second) {
      throw DataError("duplicate outcome for pair '" + outcome.pair_id + "'");
    }
  }
  std::set<std::string> pending_ids;
  for (const PairSpec& pair : state.pending_) pending_ids.insert(pair.pair_id);
  for (const auto& [id, outcome] : by_id) {
    if (!pending_ids.contains(id)) {
      throw DataError("outcome for unknown pair '" + id + "' in query '" +
                      state.query_id_ + "'");
    }
    if (outcome->majority_label &&
        (*outcome->majority_label < 0 ||
         *outcome->majority_label >= kNumFiveWayLabels)) {
      throw DataError("outcome label out of range for pair '" + id + "'");
    }
  }
  if (by_id.size() != pending_ids.size()) {
    throw DataError("outcomes cover " + std::to_string(by_id.size()) + " of " +
                    std::to_string(pending_ids.size()) +
                    " pending pairs in query '" + state.query_id_ + "'");
  }
  for (const PairSpec& pair : state.pending_) {
    const auto [left_points, right_points] =
        PointAwards(by_id.at(pair.pair_id)->majority_label);
    state.points_[state.index_.at(pair.left_item)] += left_points;
    state.points_[state.index_.at(pair.right_item)] += right_points;
  }
  state.pending_.clear();
  ++state.rounds_completed_;
}

std::vector<RoundOutcome> OutcomesFromJudgments(
    const std::vector<PairSpec>& pairs,
    const std::vector<JudgmentRecord>& records) {
  std::map<std::string, LabelCounts> counts;
  for (const PairSpec& pair : pairs) counts[pair.pair_id] = LabelCounts{};
  for (const JudgmentRecord& r : records) {
    auto it = counts.find(r.pair_id);
    if (it == counts.end()) continue;
    if (r.label < 0 || r.label >= kNumFiveWayLabels) {
      throw DataError("label out of range for pair '" + r.pair_id + "'");
    }
    ++it->second[r.label];
  }
  std::vector<RoundOutcome> outcomes;
  for (const PairSpec& pair : pairs) {
    outcomes.push_back({pair.pair_id, StrictMajorityLabel(counts[pair.pair_id])});
  }
  return outcomes;
}

std::uint64_t QuerySeed(std::uint64_t campaign_seed,
                        const std::string& query_id) {
  return MixSeed(campaign_seed, Fnv1a(query_id));
}

std::vector<JudgmentRecord> RunCampaign(const std::vector<QueryItems>& queries,
                                        int rounds, const LabelSource& source,
                                        std::uint64_t seed) {
  std::vector<TournamentState> states;
  for (const QueryItems& q : queries) {
    if (q.item_ids.size() < 2) continue;
    states.emplace_back(q.query_id, q.item_ids, QuerySeed(seed, q.query_id),
                        rounds);
  }
  std::vector<JudgmentRecord> all;
  for (int round = 0; round < rounds; ++round) {
    for (TournamentState& state : states) {
      const std::vector<PairSpec> pairs = NextRoundPairs(state);
      std::vector<JudgmentRecord> records = source(pairs);
      ApplyOutcomes(state, OutcomesFromJudgments(pairs, records));
      all.insert(all.end(), std::make_move_iterator(records.begin()),
                 std::make_move_iterator(records.end()));
    }
  }
  return all;
}

std::vector<QueryItems> GroupByQuery(const ItemTable& items) {
  std::vector<QueryItems> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto [it, inserted] = index.emplace(items.query_id(i), out.size());
    if (inserted) out.push_back({items.query_id(i), {}});
    out[it->second].item_ids.push_back(items.item_id(i));
  }
  return out;
}

std::vector<TournamentState> ReplayCampaign(
    const std::vector<QueryItems>& queries, std::uint64_t seed, int max_rounds,
    const std::vector<JudgmentRecord>& records) {
  std::set<std::string> judged;
  for (const JudgmentRecord& r : records) judged.insert(r.pair_id);
  std::vector<TournamentState> states;
  for (const QueryItems& q : queries) {
    TournamentState state(q.query_id, q.item_ids, QuerySeed(seed, q.query_id),
                          max_rounds);
    while (q.item_ids.size() >= 2 &&
           state.rounds_completed() < state.max_rounds()) {
      std::vector<PairSpec> pairs;
      try {
        pairs = NextRoundPairs(state);
      } catch (const ExhaustionError&) {
        break;
      }
      const bool complete = std::all_of(
          pairs.begin(), pairs.end(),
          [&](const PairSpec& p) { return judged.contains(p.pair_id); });
      if (!complete) break;
      ApplyOutcomes(state, OutcomesFromJudgments(pairs, records));
    }
    states.push_back(std::move(state));
  }
  return states;
}

CampaignManifest ParseManifest(std::istream& in, const std::string& source) {
  ExpectPragma(in, kManifestPragma, source);
  CampaignManifest manifest;
  bool has_campaign = false;
  std::set<std::string> seen_items;
  std::set<std::string> seen_queries;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::vector<std::string> f = SplitWhitespace(text);
    const std::string& key = f[0];
    auto single = [&]() -> const std::string& {
      if (f.size() != 2) throw DataError(where + ": '" + key + "' takes one value");
      return f[1];
    };
    if (key == "campaign") {
      CheckId(single(), where);
      manifest.campaign_id = f[1];
      has_campaign = true;
    } else if (key == "rounds") {
      const auto v = ParseInt(single(), where);
      if (v < 1) throw DataError(where + ": rounds must be >= 1");
      manifest.rounds = static_cast<int>(v);
    } else if (key == "judges_per_pair") {
      const auto v = ParseInt(single(), where);
      if (v < 1) throw DataError(where + ": judges_per_pair must be >= 1");
      manifest.judges_per_pair = static_cast<int>(v);
    } else if (key == "seed") {
      const auto v = ParseInt(single(), where);
      if (v < 0) throw DataError(where + ": seed must be >= 0");
      manifest.seed = static_cast<std::uint64_t>(v);
    } else if (key == "query") {
      if (f.size() < 2) throw DataError(where + ": query needs an id");
      CheckId(f[1], where);
      if (!seen_queries.insert(f[1]).second) {
        throw DataError(where + ": query '" + f[1] + "' listed twice");
      }
      QueryItems q{f[1], {}};
      for (std::size_t i = 2; i < f.size(); ++i) {
        CheckId(f[i], where);
        if (!seen_items.insert(f[i]).second) {
          throw DataError(where + ": item '" + f[i] + "' listed twice");
        }
        q.item_ids.push_back(f[i]);
      }
      if (q.item_ids.size() > 64) {
        throw DataError(where + ": at most 64 items per query");
      }
      manifest.queries.push_back(std::move(q));
    } else {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
  if (!has_campaign) throw DataError(source + ": missing 'campaign' line");
  if (manifest.queries.empty()) throw DataError(source + ": no 'query' lines");
  return manifest;
}

CampaignManifest ReadManifestFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ParseManifest(in, path);
}

void WriteManifest(std::ostream& out, const CampaignManifest& manifest) {
  out << kManifestPragma << "\n";
  out << "campaign " << manifest.campaign_id << "\n";
  out << "rounds " << manifest.rounds << "\n";
  out << "judges_per_pair " << manifest.judges_per_pair << "\n";
  out << "seed " << manifest.seed << "\n";
  for (const QueryItems& q : manifest.queries) {
    out << "query " << q.query_id;
    for (const std::string& item : q.item_ids) out << " " << item;
    out << "\n";
  }
}

void WritePairs(std::ostream& out, const std::vector<PairSpec>& pairs) {
  out << kPairsPragma << "\npair_id,query_id,left_item,right_item\n";
  for (const PairSpec& p : pairs) {
    out << p.pair_id << "," << p.query_id << "," << p.left_item << ","
        << p.right_item << "\n";
  }
}

}  // namespace pairrank
