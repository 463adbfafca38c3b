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

#include "pairrank/dataio.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include "pairrank/errors.h"
#include "pairrank/rng.h"
#include "pairrank/text_format.h"

namespace pairrank {
namespace {

std::string Where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

}  // namespace

std::size_t ItemTable::Add(const ItemRecord& record) {
  CheckId(record.item_id, "item id");
  CheckId(record.query_id, "query id");
  if (index_.contains(record.item_id)) {
    throw DataError("duplicate item id '" + record.item_id + "'");
  }
  for (double v : record.features) {
    if (!std::isfinite(v)) {
      throw DataError("item '" + record.item_id + "' has a non-finite feature");
    }
  }
  features_.AppendRow(record.features);
  const std::size_t index = ids_.size();
  ids_.push_back(record.item_id);
  queries_.push_back(record.query_id);
  index_.emplace(record.item_id, index);
  return index;
}

std::optional<std::size_t> ItemTable::Find(const std::string& item_id) const {
  if (auto it = index_.find(item_id); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t ItemTable::IndexOf(const std::string& item_id) const {
  if (auto found = Find(item_id)) return *found;
  throw LookupError("unknown item id '" + item_id + "'");
}

ItemRecord ItemTable::record(std::size_t i) const {
  const auto row = features_.row(i);
  return {ids_[i], queries_[i], std::vector<double>(row.begin(), row.end())};
}

ItemTable ItemTable::Subset(const std::set<std::string>& queries) const {
  ItemTable subset;
  for (std::size_t i = 0; i < size(); ++i) {
    if (queries.contains(queries_[i])) subset.Add(record(i));
  }
  return subset;
}

std::vector<std::string> ItemTable::QueryIds() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const std::string& q : queries_) {
    if (seen.insert(q).second) out.push_back(q);
  }
  return out;
}

JudgmentRecord MakeJudgment(std::string pair_id, std::string query_id,
                            std::string left_item, std::string right_item,
                            std::string judge_id, int raw_label,
                            bool presented_flipped, std::int64_t timestamp) {
  if (raw_label < 0 || raw_label >= kNumFiveWayLabels) {
    throw DataError("label " + std::to_string(raw_label) + " out of range");
  }
  JudgmentRecord record{std::move(pair_id),
                        std::move(query_id),
                        std::move(left_item),
                        std::move(right_item),
                        std::move(judge_id),
                        CanonicalLabel(raw_label, presented_flipped),
                        presented_flipped,
                        timestamp};
  ValidateJudgment(record);
  return record;
}

void ValidateJudgment(const JudgmentRecord& record) {
  CheckId(record.pair_id, "pair id");
  CheckId(record.query_id, "query id");
  CheckId(record.left_item, "left item");
  CheckId(record.right_item, "right item");
  CheckId(record.judge_id, "judge id");
  if (record.label < 0 || record.label >= kNumFiveWayLabels) {
    throw DataError("pair '" + record.pair_id + "': label " +
                    std::to_string(record.label) + " out of range");
  }
  if (record.left_item == record.right_item) {
    throw DataError("pair '" + record.pair_id + "' compares an item to itself");
  }
}

int PairCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

std::vector<PairCounts> AggregateCounts(
    const std::vector<JudgmentRecord>& records) {
  std::vector<PairCounts> table;
  std::unordered_map<std::string, std::size_t> by_pair;
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::string> duplicates;
  for (const JudgmentRecord& record : records) {
    ValidateJudgment(record);
    if (!seen.emplace(record.pair_id, record.judge_id).second) {
      duplicates.push_back("(" + record.pair_id + ", " + record.judge_id + ")");
      continue;
    }
    auto [it, inserted] = by_pair.emplace(record.pair_id, table.size());
    if (inserted) {
      PairCounts entry;
      entry.pair_id = record.pair_id;
      entry.query_id = record.query_id;
      entry.left_item = record.left_item;
      entry.right_item = record.right_item;
      table.push_back(std::move(entry));
    }
    PairCounts& entry = table[it->second];
    if (entry.left_item != record.left_item ||
        entry.right_item != record.right_item ||
        entry.query_id != record.query_id) {
      throw DataError("pair '" + record.pair_id +
                      "' recorded with inconsistent items or query");
    }
    ++entry.counts[record.label];
    entry.votes.push_back({record.judge_id, record.label});
  }
  if (!duplicates.empty()) {
    std::string message = "duplicate (pair, judge) judgments:";
    for (const std::string& d : duplicates) message += " " + d;
    throw DataError(message);
  }
  return table;
}

std::optional<int> StrictMajorityLabel(const LabelCounts& counts) {
  const int total = std::accumulate(counts.begin(), counts.end(), 0);
  for (int j = 0; j < kNumFiveWayLabels; ++j) {
    if (2 * counts[j] > total) return j;
  }
  return std::nullopt;
}

int ArgmaxLabel(const LabelCounts& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

std::vector<PairCounts> MajorityFilter(const std::vector<PairCounts>& table) {
  std::vector<PairCounts> kept;
  for (const PairCounts& pair : table) {
    if (StrictMajorityLabel(pair.counts)) kept.push_back(pair);
  }
  return kept;
}

std::vector<double> AppendSizeFeatures(std::vector<double> embedding,
                                       double width, double height) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw DomainError("image size must be positive, got " +
                      FormatDouble(width) + "x" + FormatDouble(height));
  }
  const double side = std::max(width, height);
  embedding.push_back(width / side);
  embedding.push_back(height / side);
  return embedding;
}

std::vector<BinaryPair> SynthesizePairs(
    const std::vector<AbsoluteScoreRecord>& scores, std::size_t items_sample,
    std::size_t partners_per_item, std::uint64_t seed) {
  const std::size_t n = scores.size();
  if (n < 2) throw DomainError("need at least two scored items");
  if (partners_per_item >= n) {
    throw DomainError("partners_per_item (" + std::to_string(partners_per_item) +
                      ") must be smaller than the item count (" +
                      std::to_string(n) + ")");
  }
  for (const AbsoluteScoreRecord& s : scores) {
    if (!std::isfinite(s.score)) {
      throw DataError("item '" + s.item_id + "' has a non-finite score");
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));
  const std::size_t sample = items_sample == 0 ? n : std::min(items_sample, n);

  std::vector<BinaryPair> pairs;
  std::set<std::pair<std::size_t, std::size_t>> emitted;
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> partners;
  std::set<std::size_t> picked;
  for (std::size_t s = 0; s < sample; ++s) {
    const std::size_t item = order[s];
    partners.clear();
    if (2 * partners_per_item <= n) {
      // Sparse case: rejection sampling is cheaper than a full shuffle.
      picked.clear();
      while (partners.size() < partners_per_item) {
        const std::size_t c = rng.Below(n);
        if (c != item && picked.insert(c).second) partners.push_back(c);
      }
    } else {
      candidates.clear();
      for (std::size_t c = 0; c < n; ++c) {
        if (c != item) candidates.push_back(c);
      }
      for (std::size_t k = 0; k < partners_per_item; ++k) {
        const std::size_t pick = k + rng.Below(candidates.size() - k);
        std::swap(candidates[k], candidates[pick]);
        partners.push_back(candidates[k]);
      }
    }
    for (std::size_t partner : partners) {
      const auto key = std::minmax(item, partner);
      if (!emitted.emplace(key.first, key.second).second) continue;
      const AbsoluteScoreRecord& left = scores[item];
      const AbsoluteScoreRecord& right = scores[partner];
      pairs.push_back({left.item_id, right.item_id,
                       left.score >= right.score ? 0 : 1});
    }
  }
  return pairs;
}

std::vector<JudgmentRecord> BinaryPairsToJudgments(
    const std::vector<BinaryPair>& pairs, const std::string& query_id,
    const std::string& judge_id) {
  std::vector<JudgmentRecord> records;
  records.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const BinaryPair& p = pairs[i];
    records.push_back({"s" + std::to_string(i), query_id, p.left_item,
                       p.right_item, judge_id,
                       p.label == 0 ? kLeftBetter : kRightBetter, false, 0});
  }
  return records;
}

QuerySplit SplitByQuery(const std::vector<std::string>& query_ids,
                        const std::array<double, 3>& fractions,
                        std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split fractions must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions sum to " + FormatDouble(sum) +
                      ", expected 1");
  }
  std::vector<std::string> queries = query_ids;
  std::sort(queries.begin(), queries.end());
  queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
  Rng rng(seed);
  rng.Shuffle(std::span<std::string>(queries));

  const std::size_t n = queries.size();
  const std::size_t n_train =
      std::min(n, static_cast<std::size_t>(std::llround(fractions[0] * n)));
  const std::size_t n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(fractions[1] * n)));
  QuerySplit split;
  split.train.assign(queries.begin(), queries.begin() + n_train);
  split.validation.assign(queries.begin() + n_train,
                          queries.begin() + n_train + n_val);
  split.test.assign(queries.begin() + n_train + n_val, queries.end());
  return split;
}

std::vector<JudgmentRecord> FilterByQuery(
    const std::vector<JudgmentRecord>& records,
    const std::set<std::string>& queries) {
  std::vector<JudgmentRecord> out;
  for (const JudgmentRecord& r : records) {
    if (queries.contains(r.query_id)) out.push_back(r);
  }
  return out;
}

void WriteItems(std::ostream& out, const ItemTable& items) {
  out << kItemsPragma << "\n";
  out << "item_id,query_id";
  for (std::size_t d = 0; d < items.dim(); ++d) out << ",f" << d;
  out << "\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    out << items.item_id(i) << "," << items.query_id(i);
    for (double v : items.features().row(i)) out << "," << FormatDouble(v);
    out << "\n";
  }
}

ItemTable ReadItems(std::istream& in, const std::string& source) {
  ExpectPragma(in, kItemsPragma, source);
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ":2: missing header");
  const std::vector<std::string> header = Split(Trim(line), ',');
  if (header.size() < 3 || header[0] != "item_id" || header[1] != "query_id") {
    throw DataError(source +
                    ":2: header must be item_id,query_id,<feature columns>");
  }
  const std::size_t dim = header.size() - 2;
  ItemTable table;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = Split(Trim(line), ',');
    if (fields.size() != dim + 2) {
      throw DataError(Where(source, line_no) + ": expected " +
                      std::to_string(dim + 2) + " fields, got " +
                      std::to_string(fields.size()));
    }
    ItemRecord record{fields[0], fields[1], {}};
    record.features.reserve(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      record.features.push_back(
          ParseDouble(fields[d + 2], Where(source, line_no)));
    }
    try {
      table.Add(record);
    } catch (const Error& e) {
      throw DataError(Where(source, line_no) + ": " + e.what());
    }
  }
  return table;
}

ItemTable ReadItemsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadItems(in, path);
}

std::string JudgmentLine(const JudgmentRecord& r) {
  std::ostringstream line;
  line << r.pair_id << "," << r.query_id << "," << r.left_item << ","
       << r.right_item << "," << r.judge_id << "," << r.label << ","
       << (r.presented_flipped ? 1 : 0) << "," << r.timestamp;
  return line.str();
}

void WriteJudgments(std::ostream& out,
                    const std::vector<JudgmentRecord>& records) {
  out << kJudgmentsPragma << "\n" << kJudgmentsHeader << "\n";
  for (const JudgmentRecord& r : records) out << JudgmentLine(r) << "\n";
}

JudgmentParse ReadJudgments(std::istream& in, const std::string& source) {
  ExpectPragma(in, kJudgmentsPragma, source);
  std::string line;
  if (!std::getline(in, line) || Trim(line) != kJudgmentsHeader) {
    throw DataError(source + ":2: expected header '" +
                    std::string(kJudgmentsHeader) + "'");
  }
  JudgmentParse parse;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = Where(source, line_no);
    if (Trim(line).empty()) {
      parse.warnings.push_back(where + ": blank line skipped");
      continue;
    }
    const std::vector<std::string> f = Split(Trim(line), ',');
    if (f.size() != 8) {
      throw DataError(where + ": expected 8 fields, got " +
                      std::to_string(f.size()));
    }
    JudgmentRecord r;
    r.pair_id = f[0];
    r.query_id = f[1];
    r.left_item = f[2];
    r.right_item = f[3];
    r.judge_id = f[4];
    r.label = static_cast<int>(ParseInt(f[5], where));
    r.presented_flipped = ParseBool(f[6], where);
    r.timestamp = ParseInt(f[7], where);
    try {
      ValidateJudgment(r);
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
    parse.records.push_back(std::move(r));
  }
  return parse;
}

JudgmentParse ReadJudgmentsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadJudgments(in, path);
}

void WriteScores(std::ostream& out,
                 const std::vector<AbsoluteScoreRecord>& scores) {
  out << kScoresPragma << "\nitem_id,score\n";
  for (const AbsoluteScoreRecord& s : scores) {
    out << s.item_id << "," << FormatDouble(s.score) << "\n";
  }
}

std::vector<AbsoluteScoreRecord> ReadScores(std::istream& in,
                                            const std::string& source) {
  ExpectPragma(in, kScoresPragma, source);
  std::string line;
  if (!std::getline(in, line) || Trim(line) != "item_id,score") {
    throw DataError(source + ":2: expected header 'item_id,score'");
  }
  std::vector<AbsoluteScoreRecord> scores;
  std::set<std::string> seen;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = Where(source, line_no);
    const std::vector<std::string> f = Split(Trim(line), ',');
    if (f.size() != 2) throw DataError(where + ": expected item_id,score");
    CheckId(f[0], where);
    if (!seen.insert(f[0]).second) {
      throw DataError(where + ": duplicate item id '" + f[0] + "'");
    }
    const double score = ParseDouble(f[1], where);
    if (!std::isfinite(score)) throw DataError(where + ": non-finite score");
    scores.push_back({f[0], score});
  }
  return scores;
}

std::vector<AbsoluteScoreRecord> ReadScoresFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadScores(in, path);
}

}  // namespace pairrank
