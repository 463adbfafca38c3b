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

#ifndef PAIRRANK_OBJECTIVE_H_
#define PAIRRANK_OBJECTIVE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pairrank/model.h"
#include "pairrank/rank_head.h"

namespace pairrank {

struct JudgeVote {
  std::uint32_t judge = 0;  // index into Model::judges
  int label = 0;
};

// One training pair: indices into a FeatureMatrix plus its labels, either
// as aggregated counts (shared-boundary variants) or as individual votes
// (kDarnV2).
struct PairObservation {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<int> counts;
  std::vector<JudgeVote> votes;
};

// Pairs handled by one work unit of BatchObjectiveParallel. Shards are
// reduced in index order, so results do not depend on the thread count.
inline constexpr std::size_t kDefaultShardSize = 16;

// Negative log-likelihood of one pair under the model's variant. When
// `grad` is non-null the pair's gradient is added to it.
double PairObjective(const Model& model, const FeatureMatrix& features,
                     const PairObservation& pair, const DropoutMask* mask,
                     ModelGradient* grad);

// Reference implementation: one pass over the batch in order. `masks` is
// empty (evaluation) or holds one mask per pair.
double BatchObjectiveSerial(const Model& model, const FeatureMatrix& features,
                            std::span<const PairObservation> batch,
                            std::span<const DropoutMask> masks,
                            ModelGradient* grad);

// OpenMP version of BatchObjectiveSerial. Agrees with it up to summation
// order and is bitwise reproducible for a fixed shard size.
double BatchObjectiveParallel(const Model& model, const FeatureMatrix& features,
                              std::span<const PairObservation> batch,
                              std::span<const DropoutMask> masks,
                              ModelGradient* grad,
                              std::size_t shard_size = kDefaultShardSize);

std::vector<ScoreDistribution> ScoreItemsSerial(const RankHead& head,
                                                const FeatureMatrix& features);
std::vector<ScoreDistribution> ScoreItemsParallel(const RankHead& head,
                                                  const FeatureMatrix& features);

}  // namespace pairrank

#endif  // PAIRRANK_OBJECTIVE_H_
