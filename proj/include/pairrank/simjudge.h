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

#ifndef PAIRRANK_SIMJUDGE_H_
#define PAIRRANK_SIMJUDGE_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairrank/dataio.h"
#include "pairrank/tournament.h"

namespace pairrank {

struct PlantedItem {
  std::string item_id;
  std::string query_id;
  double mu = 0.0;
  double sigma = 1.0;
};

struct PlantedJudge {
  std::string judge_id;
  double gamma = 1.0;
};

// Ground truth for synthetic judgments: judge r labels a pair by drawing
// from the ordinal probabilities of N(mu_r - mu_l, sigma_l^2 + sigma_r^2)
// against boundaries * gamma_r. Features are a fixed noisy linear
// embedding of mu.
class PlantedWorld {
 public:
  PlantedWorld(std::vector<PlantedItem> items, std::vector<double> bounds,
               std::vector<PlantedJudge> judges, std::uint64_t seed,
               std::size_t feature_dim = 8, double feature_noise = 0.01);

  const std::vector<PlantedItem>& items() const { return items_; }
  const std::vector<double>& bounds() const { return bounds_; }
  const std::vector<PlantedJudge>& judges() const { return judges_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t feature_dim() const { return feature_dim_; }
  double feature_noise() const { return feature_noise_; }

  const PlantedItem& item(const std::string& item_id) const;    // LookupError
  const PlantedJudge& judge(const std::string& judge_id) const;  // LookupError

  // Embedding x = direction * mu + offset + noise; direction and offset are
  // derived from the seed, noise from `noise_seed`.
  std::vector<double> Embed(double mu, Rng& noise_rng) const;

  // Feature table of all planted items (noise stream derived from seed).
  ItemTable Features() const;

 private:
  std::vector<PlantedItem> items_;
  std::vector<double> bounds_;
  std::vector<PlantedJudge> judges_;
  std::uint64_t seed_;
  std::size_t feature_dim_;
  double feature_noise_;
  std::vector<double> direction_;
  std::vector<double> offset_;
  std::unordered_map<std::string, std::size_t> item_index_;
  std::unordered_map<std::string, std::size_t> judge_index_;
};

// Label distribution judge `judge_id` applies to (left, right).
std::vector<double> PlantedLabelProbs(const PlantedWorld& world,
                                      const std::string& left_item,
                                      const std::string& right_item,
                                      const std::string& judge_id);

// One categorical draw, a pure function of (world seed, draw index).
int SampleLabel(const PlantedWorld& world, const std::string& left_item,
                const std::string& right_item, const std::string& judge_id,
                std::uint64_t draw_index);

// Judgments for `pairs`, each from `judges_per_pair` distinct judges
// sampled without replacement. Depends only on the world and the pair ids.
// Throws DomainError when judges_per_pair exceeds the judge pool.
std::vector<JudgmentRecord> GenerateJudgments(const PlantedWorld& world,
                                              const std::vector<PairSpec>& pairs,
                                              int judges_per_pair);

// A tournament label source backed by the planted world.
LabelSource MakeLabelSource(const PlantedWorld& world, int judges_per_pair);

// Runs a swiss campaign over the world's queries with simulated judges.
std::vector<JudgmentRecord> GenerateDataset(const PlantedWorld& world,
                                            int rounds, int judges_per_pair,
                                            std::uint64_t campaign_seed);

struct PlantSpec {
  std::size_t num_items = 50;
  std::size_t num_queries = 1;
  double mu_min = 0.0;
  double mu_max = 4.0;
  double sigma = 0.5;
  std::vector<double> bounds = {-1.5, -0.5, 0.5, 1.5};
  std::vector<double> judge_gammas = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  std::size_t feature_dim = 8;
  double feature_noise = 0.01;
  std::string item_prefix = "i";
  std::uint64_t seed = 1;
};

// Items get mu uniform in [mu_min, mu_max] and are dealt round-robin to
// queries q0, q1, ...; judges are j0, j1, ... with the listed gammas.
PlantedWorld PlantWorld(const PlantSpec& spec);

// Fresh items from the same embedding (for held-out evaluation).
struct HeldOutSet {
  ItemTable items;
  std::vector<double> mu;
};
HeldOutSet DrawHeldOutItems(const PlantedWorld& world, std::size_t count,
                            double mu_min, double mu_max, std::uint64_t seed,
                            const std::string& prefix = "h");

inline constexpr char kWorldPragma[] = "#pairrank-world v1";

//   #pairrank-world v1
//   seed <n>
//   feature_dim <n>
//   feature_noise <x>
//   bounds <b_0> ... <b_{K-2}>
//   judge <judge_id> <gamma>
//   item <item_id> <query_id> <mu> <sigma>
void WriteWorld(std::ostream& out, const PlantedWorld& world);
PlantedWorld ReadWorld(std::istream& in, const std::string& source = "<world>");
PlantedWorld ReadWorldFile(const std::string& path);

}  // namespace pairrank

#endif  // PAIRRANK_SIMJUDGE_H_
