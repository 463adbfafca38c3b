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

#ifndef PAIRRANK_DATAIO_H_
#define PAIRRANK_DATAIO_H_

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairrank/rank_head.h"

namespace pairrank {

// Five-way labels in canonical (unflipped) orientation.
enum Label : int {
  kLeftBetter = 0,
  kLeftSlightlyBetter = 1,
  kEqual = 2,
  kRightSlightlyBetter = 3,
  kRightBetter = 4,
};
inline constexpr int kNumFiveWayLabels = 5;

using LabelCounts = std::array<int, kNumFiveWayLabels>;

// Mirrors a label across the pair: j -> 4 - j.
inline int FlipLabel(int label) { return kNumFiveWayLabels - 1 - label; }
// Label as if the pair had been shown unflipped.
inline int CanonicalLabel(int raw_label, bool presented_flipped) {
  return presented_flipped ? FlipLabel(raw_label) : raw_label;
}

struct ItemRecord {
  std::string item_id;
  std::string query_id;
  std::vector<double> features;
};

// Items with their query and feature vectors; row i of features() belongs
// to item_id(i).
class ItemTable {
 public:
  // Throws DataError on a duplicate id, ConfigError on a dimension change.
  std::size_t Add(const ItemRecord& record);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return features_.cols(); }
  const FeatureMatrix& features() const { return features_; }
  const std::string& item_id(std::size_t i) const { return ids_[i]; }
  const std::string& query_id(std::size_t i) const { return queries_[i]; }
  std::optional<std::size_t> Find(const std::string& item_id) const;
  std::size_t IndexOf(const std::string& item_id) const;  // LookupError

  ItemRecord record(std::size_t i) const;
  // Items whose query is in `queries`, in original order.
  ItemTable Subset(const std::set<std::string>& queries) const;
  std::vector<std::string> QueryIds() const;  // first-appearance order

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> queries_;
  FeatureMatrix features_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct JudgmentRecord {
  std::string pair_id;
  std::string query_id;
  std::string left_item;
  std::string right_item;
  std::string judge_id;
  int label = kEqual;  // canonical orientation
  bool presented_flipped = false;
  std::int64_t timestamp = 0;  // seconds since the epoch

  bool operator==(const JudgmentRecord&) const = default;
};

// Builds a record from what the judge saw: `raw_label` refers to the
// on-screen orientation, which was mirrored when `presented_flipped`.
// Throws DataError for an invalid record (see ValidateJudgment).
JudgmentRecord MakeJudgment(std::string pair_id, std::string query_id,
                            std::string left_item, std::string right_item,
                            std::string judge_id, int raw_label,
                            bool presented_flipped, std::int64_t timestamp = 0);

// Throws DataError unless the label is in range and the items differ.
void ValidateJudgment(const JudgmentRecord& record);

struct PairVote {
  std::string judge_id;
  int label = kEqual;
};

// Judgments of one pair, aggregated.
struct PairCounts {
  std::string pair_id;
  std::string query_id;
  std::string left_item;
  std::string right_item;
  LabelCounts counts{};
  std::vector<PairVote> votes;  // submission order

  int total() const;
};

// Per-pair counts n^j, in order of first appearance. Throws DataError
// listing every (pair, judge) that occurs more than once, or when one
// pair id is recorded with different items.
std::vector<PairCounts> AggregateCounts(const std::vector<JudgmentRecord>& records);

// Label held by more than half the judgments, if any.
std::optional<int> StrictMajorityLabel(const LabelCounts& counts);
// argmax_j n^j with ties to the lowest index.
int ArgmaxLabel(const LabelCounts& counts);

// Keeps pairs with a strict majority label.
std::vector<PairCounts> MajorityFilter(const std::vector<PairCounts>& table);

struct AbsoluteScoreRecord {
  std::string item_id;
  double score = 0.0;
};

// Appends width/max_side and height/max_side to an embedding. Throws
// DomainError unless both sides are positive and finite.
std::vector<double> AppendSizeFeatures(std::vector<double> embedding,
                                       double width, double height);

// Two-way pair synthesized from absolute scores: label 0 when the left
// score is not smaller than the right one, 1 otherwise.
struct BinaryPair {
  std::string left_item;
  std::string right_item;
  int label = 0;
};

// Samples `items_sample` items (0 = all) and pairs each with
// `partners_per_item` distinct random partners, skipping unordered pairs
// already emitted. Throws DomainError for fewer than two items or when
// partners_per_item >= item count.
std::vector<BinaryPair> SynthesizePairs(
    const std::vector<AbsoluteScoreRecord>& scores, std::size_t items_sample,
    std::size_t partners_per_item, std::uint64_t seed);

// Stores binary pairs in the five-slot layout (label 0 -> slot 0, label 1
// -> slot 4) as single-judge judgments.
std::vector<JudgmentRecord> BinaryPairsToJudgments(
    const std::vector<BinaryPair>& pairs, const std::string& query_id,
    const std::string& judge_id = "synth");

struct QuerySplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Partitions distinct query ids by a seeded shuffle. The first two split
// sizes are round(fraction * count); test takes the rest. Throws
// ConfigError unless the fractions are non-negative and sum to 1.
QuerySplit SplitByQuery(const std::vector<std::string>& query_ids,
                        const std::array<double, 3>& fractions,
                        std::uint64_t seed);

std::vector<JudgmentRecord> FilterByQuery(
    const std::vector<JudgmentRecord>& records,
    const std::set<std::string>& queries);

// ---------------------------------------------------------------------------
// Text formats. Every file starts with a "#pairrank-<kind> v1" line followed
// by a comma-separated header and one record per line.

inline constexpr char kItemsPragma[] = "#pairrank-items v1";
inline constexpr char kJudgmentsPragma[] = "#pairrank-judgments v1";
inline constexpr char kScoresPragma[] = "#pairrank-scores v1";
inline constexpr char kJudgmentsHeader[] =
    "pair_id,query_id,left_item,right_item,judge_id,label,flipped,timestamp";

void WriteItems(std::ostream& out, const ItemTable& items);
ItemTable ReadItems(std::istream& in, const std::string& source = "<items>");
ItemTable ReadItemsFile(const std::string& path);

std::string JudgmentLine(const JudgmentRecord& record);
void WriteJudgments(std::ostream& out,
                    const std::vector<JudgmentRecord>& records);

struct JudgmentParse {
  std::vector<JudgmentRecord> records;
  std::vector<std::string> warnings;
};
// Blank lines are skipped with a warning; anything malformed throws
// DataError with the line number.
JudgmentParse ReadJudgments(std::istream& in,
                            const std::string& source = "<judgments>");
JudgmentParse ReadJudgmentsFile(const std::string& path);

void WriteScores(std::ostream& out,
                 const std::vector<AbsoluteScoreRecord>& scores);
std::vector<AbsoluteScoreRecord> ReadScores(std::istream& in,
                                            const std::string& source = "<scores>");
std::vector<AbsoluteScoreRecord> ReadScoresFile(const std::string& path);

}  // namespace pairrank

#endif  // PAIRRANK_DATAIO_H_
