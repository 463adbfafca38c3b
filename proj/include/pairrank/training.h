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

#ifndef PAIRRANK_TRAINING_H_
#define PAIRRANK_TRAINING_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pairrank/dataio.h"
#include "pairrank/model.h"
#include "pairrank/objective.h"

namespace pairrank {

enum class OptimizerKind { kAdam, kSgd };

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;  // pairs
  int epochs = 20;
  std::uint64_t seed = 0;
  double dropout = 0.5;
  // Empty means the symmetric unit-spaced default for the variant.
  std::vector<double> boundary_init;
  BoundaryMode boundary_mode = BoundaryMode::kFree;
  Variant variant = Variant::kDarn5;
  double sigma_floor = kDefaultSigmaFloor;
  double p_floor = kDefaultProbFloor;
  std::vector<std::size_t> hidden = {512, 256, 128};
  int patience = 5;  // epochs without validation improvement
  bool majority_filter = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t shard_size = kDefaultShardSize;

  // Throws ConfigError naming the offending key.
  void Validate() const;
};

// Keys in their canonical order, as written by WriteConfig.
const std::vector<std::string>& ConfigKeys();

// Sets one key from its text form. Throws ConfigError for unknown keys and
// unparsable values.
void SetConfigValue(TrainConfig& config, const std::string& key,
                    const std::string& value);
std::string GetConfigValue(const TrainConfig& config, const std::string& key);

// Flat "key = value" lines; '#' starts a comment. Errors carry line numbers.
TrainConfig ParseConfig(std::istream& in, const std::string& source = "<config>");
TrainConfig ReadConfigFile(const std::string& path);
void WriteConfig(std::ostream& out, const TrainConfig& config);

// Fresh parameters: trunk weights uniform in +-sqrt(6 / fan_in), trunk
// biases 0, mu and sigma head weights 0 with biases 1 (every item starts at
// mu = sigma = 1, inside both active regions), boundaries from
// boundary_init or the default, and an empty judge table.
Model InitParams(const TrainConfig& config, std::size_t input_dim,
                 std::uint64_t seed);

// Training pairs resolved against an item table.
struct PreparedPairs {
  std::vector<PairObservation> observations;
  std::vector<PairCounts> source;  // aligned with observations
};

// Aggregates `records`, optionally keeps strict-majority pairs only, and
// converts them for `model`'s variant. Five-way labels map onto two labels
// as {0,1,2} -> 0, {3,4} -> 1. For kDarnV2, unseen judges are added to the
// model's table when `add_judges` is set and rejected with LookupError
// otherwise.
PreparedPairs PreparePairs(const ItemTable& items,
                           const std::vector<JudgmentRecord>& records,
                           Model& model, bool majority_filter, bool add_judges);

struct Dataset {
  ItemTable items;
  std::vector<JudgmentRecord> judgments;
};

struct Checkpoint {
  static constexpr int kFormatVersion = 1;
  TrainConfig config;
  Model model;
  int epochs_run = 0;
  std::vector<double> loss_history;  // [0] = before training, then per epoch
};

inline constexpr char kCheckpointPragma[] = "#pairrank-checkpoint v1";

// Serialized in a fixed order: pragma, [config] keys in ConfigKeys() order,
// [model] (variant, shape, floors, head parameters, boundaries, judges),
// [meta] (epochs, loss history). Re-serializing a parsed checkpoint is
// byte-identical.
void WriteCheckpoint(std::ostream& out, const Checkpoint& checkpoint);
std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint ParseCheckpoint(std::istream& in,
                           const std::string& source = "<checkpoint>");
Checkpoint ReadCheckpointFile(const std::string& path);
void WriteCheckpointFile(const std::string& path, const Checkpoint& checkpoint);

struct EpochReport {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> validation_accuracy;
};

struct TrainOptions {
  const Dataset* validation = nullptr;  // enables early stopping
  std::function<void(const EpochReport&)> on_epoch;
  // Called after every optimizer step; used by tests to check invariants.
  std::function<void(const Model&)> on_step;
};

// Mini-batch training. Deterministic for a given config.seed: init, batch
// order and dropout masks all derive from it. With a validation set, stops
// after `patience` epochs without accuracy gains and restores the best
// parameters; without one, returns the parameters with the lowest training
// loss at an epoch boundary (initialization included). Throws DomainError for an empty dataset, ConfigError on
// dimension mismatch, NumericError when the loss diverges.
Checkpoint Train(const Dataset& train, const TrainConfig& config,
                 const TrainOptions& options = {});

// Summed cost over `data` with dropout disabled.
double EvaluateLoss(const Dataset& data, const Checkpoint& checkpoint);
double EvaluateLoss(const Model& model, const FeatureMatrix& features,
                    const std::vector<PairObservation>& pairs);

// Score distribution of every item in `items`.
std::vector<ScoreDistribution> ScoreItems(const Model& model,
                                          const ItemTable& items);

// Predicted and true labels over the (optionally majority-filtered) pairs of
// `records`. Five-way variants predict argmax_j p^j (kDarnV2: per-judge
// vote over the pair's judges; judges missing from the table use gamma 1).
// The binary variant predicts in {0, 1}.
struct PairPredictions {
  std::vector<int> predicted;
  std::vector<LabelCounts> truth;
  std::vector<std::pair<double, double>> mu_left_right;
};
PairPredictions PredictPairs(const Model& model, const ItemTable& items,
                             const std::vector<JudgmentRecord>& records,
                             bool majority_filter);

// Accuracy used for early stopping: five-way for five-label variants,
// binary for darn-binary.
double ValidationAccuracy(const Model& model, const Dataset& data,
                          bool majority_filter);

}  // namespace pairrank

#endif  // PAIRRANK_TRAINING_H_
