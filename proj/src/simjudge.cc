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

#include "pairrank/simjudge.h"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "pairrank/boundaries.h"
#include "pairrank/errors.h"
#include "pairrank/likelihood.h"
#include "pairrank/rng.h"
#include "pairrank/text_format.h"

namespace pairrank {

PlantedWorld::PlantedWorld(std::vector<PlantedItem> items,
                           std::vector<double> bounds,
                           std::vector<PlantedJudge> judges, std::uint64_t seed,
                           std::size_t feature_dim, double feature_noise)
    : items_(std::move(items)),
      bounds_(std::move(bounds)),
      judges_(std::move(judges)),
      seed_(seed),
      feature_dim_(feature_dim),
      feature_noise_(feature_noise) {
  CheckStrictlyIncreasing(bounds_);
  if (feature_dim_ == 0) throw ConfigError("feature_dim must be > 0");
  if (!(feature_noise_ >= 0.0)) throw ConfigError("feature_noise must be >= 0");
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const PlantedItem& item = items_[i];
    CheckId(item.item_id, "planted item");
    CheckId(item.query_id, "planted item query");
    if (!std::isfinite(item.mu)) {
      throw InvariantError("planted mu of '" + item.item_id + "' not finite");
    }
    if (!(item.sigma >= kDefaultSigmaFloor) || !std::isfinite(item.sigma)) {
      throw InvariantError("planted sigma of '" + item.item_id +
                           "' below the floor");
    }
    if (!item_index_.emplace(item.item_id, i).second) {
      throw DataError("duplicate planted item '" + item.item_id + "'");
    }
  }
  for (std::size_t r = 0; r < judges_.size(); ++r) {
    CheckId(judges_[r].judge_id, "planted judge");
    if (!(judges_[r].gamma > 0.0) || !std::isfinite(judges_[r].gamma)) {
      throw InvariantError("planted gamma of '" + judges_[r].judge_id +
                           "' must be > 0");
    }
    if (!judge_index_.emplace(judges_[r].judge_id, r).second) {
      throw DataError("duplicate planted judge '" + judges_[r].judge_id + "'");
    }
  }
  Rng rng(MixSeed(seed_, 0xfea7u));
  direction_.resize(feature_dim_);
  offset_.resize(feature_dim_);
  double norm = 0.0;
  for (double& a : direction_) {
    a = rng.Uniform(-1.0, 1.0);
    norm += a * a;
  }
  norm = std::sqrt(norm);
  for (double& a : direction_) a /= norm;
  for (double& c : offset_) c = rng.Uniform(-0.5, 0.5);
}

const PlantedItem& PlantedWorld::item(const std::string& item_id) const {
  auto it = item_index_.find(item_id);
  if (it == item_index_.end()) {
    throw LookupError("unknown planted item '" + item_id + "'");
  }
  return items_[it->second];
}

const PlantedJudge& PlantedWorld::judge(const std::string& judge_id) const {
  auto it = judge_index_.find(judge_id);
  if (it == judge_index_.end()) {
    throw LookupError("unknown planted judge '" + judge_id + "'");
  }
  return judges_[it->second];
}

std::vector<double> PlantedWorld::Embed(double mu, Rng& noise_rng) const {
  std::vector<double> x(feature_dim_);
  for (std::size_t d = 0; d < feature_dim_; ++d) {
    x[d] = direction_[d] * mu + offset_[d] + noise_rng.Normal(0.0, feature_noise_);
  }
  return x;
}

ItemTable PlantedWorld::Features() const {
  ItemTable table;
  Rng noise(MixSeed(seed_, 0x0153u));
  for (const PlantedItem& item : items_) {
    table.Add({item.item_id, item.query_id, Embed(item.mu, noise)});
  }
  return table;
}

std::vector<double> PlantedLabelProbs(const PlantedWorld& world,
                                      const std::string& left_item,
                                      const std::string& right_item,
                                      const std::string& judge_id) {
  const PlantedItem& left = world.item(left_item);
  const PlantedItem& right = world.item(right_item);
  const double gamma = world.judge(judge_id).gamma;
  const PairScoreDiff diff = MakePairScoreDiff({left.mu, left.sigma},
                                               {right.mu, right.sigma});
  return PairLabelProbs(diff, ScaleBounds(world.bounds(), gamma));
}

int SampleLabel(const PlantedWorld& world, const std::string& left_item,
                const std::string& right_item, const std::string& judge_id,
                std::uint64_t draw_index) {
  const std::vector<double> probs =
      PlantedLabelProbs(world, left_item, right_item, judge_id);
  Rng rng(MixSeed(world.seed(), draw_index));
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
    cumulative += probs[j];
    if (u < cumulative) return static_cast<int>(j);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::vector<JudgmentRecord> GenerateJudgments(const PlantedWorld& world,
                                              const std::vector<PairSpec>& pairs,
                                              int judges_per_pair) {
  const std::size_t pool = world.judges().size();
  if (judges_per_pair < 1 || static_cast<std::size_t>(judges_per_pair) > pool) {
    throw DomainError("judges_per_pair " + std::to_string(judges_per_pair) +
                      " exceeds the pool of " + std::to_string(pool) +
                      " judges");
  }
  const int num_labels = static_cast<int>(world.bounds().size()) + 1;
  std::vector<JudgmentRecord> records;
  std::vector<std::size_t> judges(pool);
  for (const PairSpec& pair : pairs) {
    const std::uint64_t pair_key = Fnv1a(pair.pair_id);
    Rng rng(MixSeed(world.seed(), pair_key));
    std::iota(judges.begin(), judges.end(), 0);
    for (int k = 0; k < judges_per_pair; ++k) {
      const std::size_t pick = k + rng.Below(pool - k);
      std::swap(judges[k], judges[pick]);
      const PlantedJudge& judge = world.judges()[judges[k]];
      int label = SampleLabel(world, pair.left_item, pair.right_item,
                              judge.judge_id, MixSeed(pair_key, judges[k] + 1));
      // Two-label worlds use the outer slots of the five-way layout.
      if (num_labels == 2) label = label == 0 ? kLeftBetter : kRightBetter;
      const bool flipped = rng.Coin();
      JudgmentRecord record{pair.pair_id,    pair.query_id, pair.left_item,
                            pair.right_item, judge.judge_id, label,
                            flipped,         0};
      records.push_back(std::move(record));
    }
  }
  return records;
}

LabelSource MakeLabelSource(const PlantedWorld& world, int judges_per_pair) {
  return [&world, judges_per_pair](const std::vector<PairSpec>& pairs) {
    return GenerateJudgments(world, pairs, judges_per_pair);
  };
}

std::vector<JudgmentRecord> GenerateDataset(const PlantedWorld& world,
                                            int rounds, int judges_per_pair,
                                            std::uint64_t campaign_seed) {
  std::vector<QueryItems> queries;
  std::map<std::string, std::size_t> index;
  for (const PlantedItem& item : world.items()) {
    auto [it, inserted] = index.emplace(item.query_id, queries.size());
    if (inserted) queries.push_back({item.query_id, {}});
    queries[it->second].item_ids.push_back(item.item_id);
  }
  return RunCampaign(queries, rounds, MakeLabelSource(world, judges_per_pair),
                     campaign_seed);
}

PlantedWorld PlantWorld(const PlantSpec& spec) {
  if (spec.num_queries == 0) throw ConfigError("num_queries must be > 0");
  Rng rng(MixSeed(spec.seed, 0x91a7u));
  std::vector<PlantedItem> items;
  for (std::size_t i = 0; i < spec.num_items; ++i) {
    items.push_back({spec.item_prefix + std::to_string(i),
                     "q" + std::to_string(i % spec.num_queries),
                     rng.Uniform(spec.mu_min, spec.mu_max), spec.sigma});
  }
  std::vector<PlantedJudge> judges;
  for (std::size_t r = 0; r < spec.judge_gammas.size(); ++r) {
    judges.push_back({"j" + std::to_string(r), spec.judge_gammas[r]});
  }
  return PlantedWorld(std::move(items), spec.bounds, std::move(judges),
                      spec.seed, spec.feature_dim, spec.feature_noise);
}

HeldOutSet DrawHeldOutItems(const PlantedWorld& world, std::size_t count,
                            double mu_min, double mu_max, std::uint64_t seed,
                            const std::string& prefix) {
  HeldOutSet out;
  Rng rng(MixSeed(seed, 0x4e1du));
  for (std::size_t i = 0; i < count; ++i) {
    const double mu = rng.Uniform(mu_min, mu_max);
    out.mu.push_back(mu);
    out.items.Add({prefix + std::to_string(i), "heldout", world.Embed(mu, rng)});
  }
  return out;
}

void WriteWorld(std::ostream& out, const PlantedWorld& world) {
  out << kWorldPragma << "\n";
  out << "seed " << world.seed() << "\n";
  out << "feature_dim " << world.feature_dim() << "\n";
  out << "feature_noise " << FormatDouble(world.feature_noise()) << "\n";
  out << "bounds";
  for (double b : world.bounds()) out << " " << FormatDouble(b);
  out << "\n";
  for (const PlantedJudge& j : world.judges()) {
    out << "judge " << j.judge_id << " " << FormatDouble(j.gamma) << "\n";
  }
  for (const PlantedItem& i : world.items()) {
    out << "item " << i.item_id << " " << i.query_id << " "
        << FormatDouble(i.mu) << " " << FormatDouble(i.sigma) << "\n";
  }
}

PlantedWorld ReadWorld(std::istream& in, const std::string& source) {
  ExpectPragma(in, kWorldPragma, source);
  std::uint64_t seed = 0;
  std::size_t dim = 8;
  double noise = 0.01;
  std::vector<double> bounds;
  std::vector<PlantedJudge> judges;
  std::vector<PlantedItem> items;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::vector<std::string> f = SplitWhitespace(text);
    const std::string& key = f[0];
    auto arity = [&](std::size_t n) {
      if (f.size() != n + 1) {
        throw DataError(where + ": '" + key + "' takes " + std::to_string(n) +
                        " values");
      }
    };
    if (key == "seed") {
      arity(1);
      seed = static_cast<std::uint64_t>(ParseInt(f[1], where));
    } else if (key == "feature_dim") {
      arity(1);
      dim = static_cast<std::size_t>(ParseInt(f[1], where));
    } else if (key == "feature_noise") {
      arity(1);
      noise = ParseDouble(f[1], where);
    } else if (key == "bounds") {
      bounds.clear();
      for (std::size_t i = 1; i < f.size(); ++i) {
        bounds.push_back(ParseDouble(f[i], where));
      }
    } else if (key == "judge") {
      arity(2);
      judges.push_back({f[1], ParseDouble(f[2], where)});
    } else if (key == "item") {
      arity(4);
      items.push_back({f[1], f[2], ParseDouble(f[3], where),
                       ParseDouble(f[4], where)});
    } else {
      throw DataError(where + ": unknown key '" + key + "'");
    }
  }
  try {
    return PlantedWorld(std::move(items), std::move(bounds), std::move(judges),
                        seed, dim, noise);
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
}

PlantedWorld ReadWorldFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadWorld(in, path);
}

}  // namespace pairrank
