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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles/oracles.h"
#include "pairrank/errors.h"
#include "pairrank/metrics.h"
#include "pairrank/rng.h"
#include "pairrank/tournament.h"

namespace pairrank {
namespace {

std::vector<std::string> Ids(std::size_t n, const std::string& prefix = "i") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

std::vector<RoundOutcome> AllLabel(const std::vector<PairSpec>& pairs, int label) {
  std::vector<RoundOutcome> out;
  for (const PairSpec& p : pairs) out.push_back({p.pair_id, label});
  return out;
}

TEST(AwardsTest, ScoringRule) {
  EXPECT_EQ(PointAwards(0), std::make_pair(3.0, 0.0));
  EXPECT_EQ(PointAwards(1), std::make_pair(1.0, 0.0));
  EXPECT_EQ(PointAwards(2), std::make_pair(0.0, 0.0));
  EXPECT_EQ(PointAwards(3), std::make_pair(0.0, 1.0));
  EXPECT_EQ(PointAwards(4), std::make_pair(0.0, 3.0));
  EXPECT_EQ(PointAwards(std::nullopt), std::make_pair(0.0, 0.0));
}

TEST(RoundTest, FirstRoundPairsEveryone) {
  TournamentState state("q", Ids(8), 17);
  const auto pairs = NextRoundPairs(state);
  ASSERT_EQ(pairs.size(), 4u);
  std::set<std::string> seen;
  for (const PairSpec& p : pairs) {
    EXPECT_EQ(p.query_id, "q");
    EXPECT_TRUE(seen.insert(p.left_item).second);
    EXPECT_TRUE(seen.insert(p.right_item).second);
  }
  EXPECT_EQ(pairs[0].pair_id, MakePairId("q", 1, 0));
}

TEST(RoundTest, SameSeedSamePairs) {
  TournamentState a("q", Ids(9), 5);
  TournamentState b("q", Ids(9), 5);
  TournamentState c("q", Ids(9), 6);
  const auto pa = NextRoundPairs(a);
  const auto pb = NextRoundPairs(b);
  const auto pc = NextRoundPairs(c);
  ASSERT_EQ(pa.size(), 4u);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].left_item, pb[i].left_item);
    EXPECT_EQ(pa[i].right_item, pb[i].right_item);
  }
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    differs |= pa[i].left_item != pc[i].left_item || pa[i].right_item != pc[i].right_item;
  }
  EXPECT_TRUE(differs);
}

TEST(RoundTest, ApplyOutcomesScores) {
  TournamentState state("q", Ids(4), 1);
  auto pairs = NextRoundPairs(state);
  ApplyOutcomes(state, {{pairs[0].pair_id, 0}, {pairs[1].pair_id, 2}});
  EXPECT_EQ(state.points(pairs[0].left_item), 3.0);
  EXPECT_EQ(state.points(pairs[0].right_item), 0.0);
  EXPECT_EQ(state.points(pairs[1].left_item), 0.0);
  EXPECT_EQ(state.points(pairs[1].right_item), 0.0);
  EXPECT_EQ(state.rounds_completed(), 1);
  EXPECT_TRUE(state.pending().empty());
}

TEST(RoundTest, SlightWinsAccumulate) {
  TournamentState state("q", Ids(4), 1, 5);
  for (int round = 0; round < 2; ++round) {
    std::vector<RoundOutcome> out;
    for (const PairSpec& s : NextRoundPairs(state)) {
      const int label = s.left_item == "i0" ? 1 : s.right_item == "i0" ? 3 : 2;
      out.push_back({s.pair_id, label});
    }
    ApplyOutcomes(state, out);
  }
  EXPECT_EQ(state.points("i0"), 2.0);
}

TEST(RoundTest, RegroupsByScore) {
  TournamentState state("q", Ids(8), 3);
  auto first = NextRoundPairs(state);
  ApplyOutcomes(state, AllLabel(first, 0));
  const auto second = NextRoundPairs(state);
  ASSERT_EQ(second.size(), 4u);
  for (const PairSpec& p : second) {
    EXPECT_EQ(state.points(p.left_item), state.points(p.right_item));
    EXPECT_FALSE(std::any_of(first.begin(), first.end(), [&](const PairSpec& f) {
      return std::minmax(f.left_item, f.right_item) == std::minmax(p.left_item, p.right_item);
    }));
  }
}

TEST(RoundTest, HigherRankedItemIsPresentedLeft) {
  TournamentState state("q", Ids(6), 8);
  ApplyOutcomes(state, AllLabel(NextRoundPairs(state), 4));
  for (const PairSpec& p : NextRoundPairs(state)) {
    EXPECT_GE(state.points(p.left_item), state.points(p.right_item));
  }
}

TEST(RoundTest, BlockedTopPairDropsIntoNextGroup) {
  // a, b lead with 3 points and have already met.
  TournamentState state("q", {"a", "b", "c", "d"}, 2);
  state.SetPoints(0, 3.0);
  state.SetPoints(1, 3.0);
  state.MarkUsed(0, 1);
  const auto pairs = NextRoundPairs(state);
  ASSERT_EQ(pairs.size(), 2u);
  for (const PairSpec& p : pairs) {
    EXPECT_EQ(state.points(p.left_item), 3.0);
    EXPECT_EQ(state.points(p.right_item), 0.0);
  }
}

TEST(RoundTest, OddCountGivesLowestRankedBye) {
  TournamentState state("q", Ids(5), 4);
  state.SetPoints(4, -1.0);
  const auto pairs = NextRoundPairs(state);
  ASSERT_EQ(pairs.size(), 2u);
  for (const PairSpec& p : pairs) {
    EXPECT_NE(p.left_item, "i4");
    EXPECT_NE(p.right_item, "i4");
  }
}

TEST(RoundTest, Errors) {
  TournamentState lonely("q", Ids(1), 1);
  EXPECT_THROW(NextRoundPairs(lonely), DomainError);
  EXPECT_THROW(TournamentState("q", {"a", "a"}, 1), DataError);

  TournamentState state("q", Ids(4), 1, 1);
  const auto pairs = NextRoundPairs(state);
  EXPECT_THROW(NextRoundPairs(state), DomainError);  // still pending
  EXPECT_THROW(ApplyOutcomes(state, {{"q:9:9", 0}, {pairs[1].pair_id, 0}}), DataError);
  EXPECT_THROW(ApplyOutcomes(state, {{pairs[0].pair_id, 0}}), DataError);
  EXPECT_THROW(ApplyOutcomes(state, {{pairs[0].pair_id, 7}, {pairs[1].pair_id, 0}}),
               DataError);
  ApplyOutcomes(state, AllLabel(pairs, 2));
  EXPECT_THROW(NextRoundPairs(state), DomainError);  // max rounds
}

TEST(RoundTest, ExhaustionNamesTheGroup) {
  TournamentState state("qq", Ids(2), 1);
  ApplyOutcomes(state, AllLabel(NextRoundPairs(state), 0));
  try {
    NextRoundPairs(state);
    FAIL();
  } catch (const ExhaustionError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("qq"), std::string::npos) << what;
    EXPECT_NE(what.find("group"), std::string::npos) << what;
  }
}

// Every used-pair subset for small N against the brute-force matcher.
TEST(MatchTest, AgreesWithBruteForceOnAllSmallStates) {
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    for (std::uint64_t mask = 0; mask < (1ULL << edges.size()); ++mask) {
      auto ok = [&](std::size_t a, std::size_t b) {
        const std::pair<std::size_t, std::size_t> key = std::minmax(a, b);
        for (std::size_t e = 0; e < edges.size(); ++e) {
          if ((mask >> e & 1) && edges[e] == key) return false;
        }
        return true;
      };
      const auto got = MatchInOrder(n, ok);
      const auto want = oracle::BruteMatch(n, ok);
      ASSERT_EQ(got.has_value(), want.has_value()) << "n=" << n << " mask=" << mask;
      if (!got) continue;
      EXPECT_EQ(got->pairs, want->pairs) << "n=" << n << " mask=" << mask;
      EXPECT_EQ(got->bye, want->bye) << "n=" << n << " mask=" << mask;
    }
  }
}

TEST(CampaignTest, PairCountsAndNoRepeats) {
  Rng rng(12);
  const std::vector<QueryItems> queries = {{"a", Ids(30, "a")}, {"b", Ids(7, "b")}};
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::string, std::string> query_of;
  for (const auto& q : queries)
    for (const auto& i : q.item_ids) query_of[i] = q.query_id;
  LabelSource source = [&](const std::vector<PairSpec>& pairs) {
    std::vector<JudgmentRecord> out;
    for (const PairSpec& p : pairs) {
      out.push_back(MakeJudgment(p.pair_id, p.query_id, p.left_item, p.right_item, "j",
                                 static_cast<int>(rng.Below(5)), false));
    }
    return out;
  };
  const auto records = RunCampaign(queries, 2, source, 99);
  std::map<std::string, int> per_query;
  for (const JudgmentRecord& r : records) {
    EXPECT_EQ(query_of[r.left_item], r.query_id);
    EXPECT_EQ(query_of[r.right_item], r.query_id);
    EXPECT_TRUE(seen.insert(std::minmax(r.left_item, r.right_item)).second);
    ++per_query[r.query_id];
  }
  EXPECT_EQ(per_query["a"], 30);
  EXPECT_EQ(per_query["b"], 6);
}

TEST(CampaignTest, TwoItemsOneRound) {
  LabelSource source = [](const std::vector<PairSpec>& pairs) {
    std::vector<JudgmentRecord> out;
    for (const PairSpec& p : pairs)
      out.push_back(MakeJudgment(p.pair_id, p.query_id, p.left_item, p.right_item, "j", 2, false));
    return out;
  };
  EXPECT_EQ(RunCampaign({{"q", {"x", "y"}}, {"solo", {"z"}}}, 1, source, 1).size(), 1u);
}

TEST(CampaignTest, NoiselessFiveRoundsRecoverOrder) {
  std::map<std::string, double> truth;
  const auto ids = Ids(10);
  Rng rng(5);
  for (const auto& id : ids) truth[id] = rng.Uniform(0, 10);
  LabelSource source = [&](const std::vector<PairSpec>& pairs) {
    std::vector<JudgmentRecord> out;
    for (const PairSpec& p : pairs) {
      const int label = truth[p.left_item] > truth[p.right_item] ? 0 : 4;
      out.push_back(MakeJudgment(p.pair_id, p.query_id, p.left_item, p.right_item, "j", label, false));
    }
    return out;
  };
  const auto records = RunCampaign({{"q", ids}}, 5, source, 21);
  const auto states = ReplayCampaign({{"q", ids}}, 21, 5, records);
  ASSERT_EQ(states.size(), 1u);
  std::vector<double> points, planted;
  for (const auto& id : ids) {
    points.push_back(states[0].points(id));
    planted.push_back(truth[id]);
  }
  EXPECT_GE(Srcc(points, planted), 0.9);
}

TEST(CampaignTest, OutcomesUseStrictMajority) {
  const std::vector<PairSpec> pairs = {{"p", "q", "a", "b"}, {"r", "q", "c", "d"}};
  std::vector<JudgmentRecord> records;
  for (int i = 0; i < 3; ++i)
    records.push_back(MakeJudgment("p", "q", "a", "b", "j" + std::to_string(i), i == 2 ? 4 : 1, false));
  records.push_back(MakeJudgment("r", "q", "c", "d", "j0", 0, false));
  records.push_back(MakeJudgment("r", "q", "c", "d", "j1", 4, false));
  const auto out = OutcomesFromJudgments(pairs, records);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].majority_label, 1);
  EXPECT_FALSE(out[1].majority_label.has_value());
}

TEST(ReplayTest, RebuildsStateAndNextRound) {
  const std::vector<QueryItems> queries = {{"q", Ids(9)}};
  Rng rng(77);
  std::vector<std::vector<PairSpec>> rounds;
  LabelSource source = [&](const std::vector<PairSpec>& pairs) {
    rounds.push_back(pairs);
    std::vector<JudgmentRecord> out;
    for (const PairSpec& p : pairs) {
      for (int j = 0; j < 3; ++j) {
        out.push_back(MakeJudgment(p.pair_id, p.query_id, p.left_item, p.right_item,
                                   "j" + std::to_string(j), static_cast<int>(rng.Below(5)), false));
      }
    }
    return out;
  };
  const auto records = RunCampaign(queries, 3, source, 5);
  ASSERT_EQ(rounds.size(), 3u);
  std::vector<JudgmentRecord> first_two;
  for (const auto& r : records) {
    if (r.pair_id.find(":3:") == std::string::npos) first_two.push_back(r);
  }
  const auto states = ReplayCampaign(queries, 5, 3, first_two);
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(states[0].rounds_completed(), 2);
  const auto& pending = states[0].pending();
  ASSERT_EQ(pending.size(), rounds[2].size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    EXPECT_EQ(pending[i].pair_id, rounds[2][i].pair_id);
    EXPECT_EQ(pending[i].left_item, rounds[2][i].left_item);
    EXPECT_EQ(pending[i].right_item, rounds[2][i].right_item);
  }
  const auto done = ReplayCampaign(queries, 5, 3, records);
  EXPECT_EQ(done[0].rounds_completed(), 3);
  EXPECT_TRUE(done[0].pending().empty());
}

TEST(ManifestTest, RoundTrip) {
  CampaignManifest m;
  m.campaign_id = "c1";
  m.rounds = 5;
  m.judges_per_pair = 3;
  m.seed = 42;
  m.queries = {{"q1", {"a", "b", "c"}}, {"q2", {"d", "e"}}};
  std::ostringstream out;
  WriteManifest(out, m);
  std::istringstream in(out.str());
  const CampaignManifest back = ParseManifest(in);
  EXPECT_EQ(back.campaign_id, "c1");
  EXPECT_EQ(back.rounds, 5);
  EXPECT_EQ(back.judges_per_pair, 3);
  EXPECT_EQ(back.seed, 42u);
  ASSERT_EQ(back.queries.size(), 2u);
  EXPECT_EQ(back.queries[1].item_ids, (std::vector<std::string>{"d", "e"}));
  std::ostringstream again;
  WriteManifest(again, back);
  EXPECT_EQ(again.str(), out.str());
}

void ExpectManifestError(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  try {
    ParseManifest(in, "m.txt");
    FAIL() << "accepted: " << text;
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
  }
}

TEST(ManifestTest, ErrorsCarryLineNumbers) {
  const std::string head = "#pairrank-manifest v1\ncampaign c\n";
  ExpectManifestError(head + "rounds 0\nquery q a b\n", "m.txt:3");
  ExpectManifestError(head + "# note\nquery q a b\nquery q c d\n", "m.txt:5");
  ExpectManifestError(head + "query q a b a\n", "m.txt:3");
  ExpectManifestError(head + "colour blue\n", "m.txt:3");
  ExpectManifestError(head, "no 'query'");
  ExpectManifestError("#pairrank-manifest v2\n", "m.txt");
}

}  // namespace
}  // namespace pairrank
