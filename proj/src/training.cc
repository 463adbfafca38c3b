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

#include "pairrank/training.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <type_traits>
#include <sstream>

#include "pairrank/errors.h"
#include "pairrank/metrics.h"
#include "pairrank/rng.h"
#include "pairrank/text_format.h"

namespace pairrank {
namespace {

std::string JoinDoubles(const std::vector<double>& values) {
  if (values.empty()) return "default";
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += FormatDouble(values[i]);
  }
  return out;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(ParseDouble(value, key));
    } else {
      const std::int64_t v = ParseInt(value, key);
      if constexpr (std::is_unsigned_v<T>) {
        if (v < 0) throw DataError(key + ": must be non-negative");
      }
      return static_cast<T>(v);
    }
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = {
      "variant",      "optimizer",    "learning_rate",   "batch_size",
      "epochs",       "seed",         "dropout",         "hidden",
      "boundary_init", "boundary_mode", "sigma_floor",   "p_floor",
      "patience",     "majority_filter", "adam_beta1",   "adam_beta2",
      "adam_epsilon", "shard_size"};
  return keys;
}

void SetConfigValue(TrainConfig& c, const std::string& key,
                    const std::string& raw_value) {
  const std::string value(Trim(raw_value));
  if (key == "variant") {
    c.variant = ParseVariant(value);
  } else if (key == "optimizer") {
    if (value == "adam") {
      c.optimizer = OptimizerKind::kAdam;
    } else if (value == "sgd") {
      c.optimizer = OptimizerKind::kSgd;
    } else {
      throw ConfigError("optimizer must be adam or sgd, got '" + value + "'");
    }
  } else if (key == "learning_rate") {
    c.learning_rate = ParseNumber<double>(key, value);
  } else if (key == "batch_size") {
    c.batch_size = ParseNumber<std::size_t>(key, value);
  } else if (key == "epochs") {
    c.epochs = ParseNumber<int>(key, value);
  } else if (key == "seed") {
    c.seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "dropout") {
    c.dropout = ParseNumber<double>(key, value);
  } else if (key == "hidden") {
    c.hidden.clear();
    for (const std::string& part : Split(value, ',')) {
      c.hidden.push_back(ParseNumber<std::size_t>(key, part));
    }
  } else if (key == "boundary_init") {
    c.boundary_init.clear();
    if (value != "default") {
      for (const std::string& part : Split(value, ',')) {
        c.boundary_init.push_back(ParseNumber<double>(key, part));
      }
    }
  } else if (key == "boundary_mode") {
    c.boundary_mode = ParseBoundaryMode(value);
  } else if (key == "sigma_floor") {
    c.sigma_floor = ParseNumber<double>(key, value);
  } else if (key == "p_floor") {
    c.p_floor = ParseNumber<double>(key, value);
  } else if (key == "patience") {
    c.patience = ParseNumber<int>(key, value);
  } else if (key == "majority_filter") {
    try {
      c.majority_filter = ParseBool(value, key);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "adam_beta1") {
    c.adam_beta1 = ParseNumber<double>(key, value);
  } else if (key == "adam_beta2") {
    c.adam_beta2 = ParseNumber<double>(key, value);
  } else if (key == "adam_epsilon") {
    c.adam_epsilon = ParseNumber<double>(key, value);
  } else if (key == "shard_size") {
    c.shard_size = ParseNumber<std::size_t>(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string GetConfigValue(const TrainConfig& c, const std::string& key) {
  if (key == "variant") return VariantName(c.variant);
  if (key == "optimizer") {
    return c.optimizer == OptimizerKind::kAdam ? "adam" : "sgd";
  }
  if (key == "learning_rate") return FormatDouble(c.learning_rate);
  if (key == "batch_size") return std::to_string(c.batch_size);
  if (key == "epochs") return std::to_string(c.epochs);
  if (key == "seed") return std::to_string(c.seed);
  if (key == "dropout") return FormatDouble(c.dropout);
  if (key == "hidden") {
    std::string out;
    for (std::size_t i = 0; i < c.hidden.size(); ++i) {
      if (i > 0) out += ",";
      out += std::to_string(c.hidden[i]);
    }
    return out;
  }
  if (key == "boundary_init") return JoinDoubles(c.boundary_init);
  if (key == "boundary_mode") return BoundaryModeName(c.boundary_mode);
  if (key == "sigma_floor") return FormatDouble(c.sigma_floor);
  if (key == "p_floor") return FormatDouble(c.p_floor);
  if (key == "patience") return std::to_string(c.patience);
  if (key == "majority_filter") return c.majority_filter ? "true" : "false";
  if (key == "adam_beta1") return FormatDouble(c.adam_beta1);
  if (key == "adam_beta2") return FormatDouble(c.adam_beta2);
  if (key == "adam_epsilon") return FormatDouble(c.adam_epsilon);
  if (key == "shard_size") return std::to_string(c.shard_size);
  throw ConfigError("unknown config key '" + key + "'");
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  };
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be > 0");
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (epochs < 0) fail("epochs", "must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must be in [0, 1)");
  if (hidden.empty()) fail("hidden", "needs at least one layer");
  for (std::size_t h : hidden) {
    if (h == 0) fail("hidden", "widths must be > 0");
  }
  if (!(sigma_floor > 0.0)) fail("sigma_floor", "must be > 0");
  if (!(p_floor > 0.0 && p_floor < 1.0)) fail("p_floor", "must be in (0, 1)");
  if (patience < 1) fail("patience", "must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1", "must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2", "must be in [0, 1)");
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon", "must be > 0");
  if (shard_size < 1) fail("shard_size", "must be >= 1");
  if (!boundary_init.empty()) {
    const std::size_t want = static_cast<std::size_t>(NumLabels(variant)) - 1;
    if (boundary_init.size() != want) {
      fail("boundary_init", "needs " + std::to_string(want) + " values for " +
                                VariantName(variant));
    }
    try {
      BoundarySet::FromValues(boundary_init, boundary_mode);
    } catch (const InvariantError& e) {
      fail("boundary_init", e.what());
    }
  }
}

TrainConfig ParseConfig(std::istream& in, const std::string& source) {
  TrainConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = Trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key(Trim(text.substr(0, eq)));
    const std::string value(Trim(text.substr(eq + 1)));
    try {
      SetConfigValue(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return config;
}

TrainConfig ReadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ParseConfig(in, path);
}

void WriteConfig(std::ostream& out, const TrainConfig& config) {
  for (const std::string& key : ConfigKeys()) {
    out << key << " = " << GetConfigValue(config, key) << "\n";
  }
}

Model InitParams(const TrainConfig& config, std::size_t input_dim,
                 std::uint64_t seed) {
  config.Validate();
  Model model;
  model.variant = config.variant;
  model.p_floor = config.p_floor;
  model.head = RankHead(HeadShape{input_dim, config.hidden}, config.sigma_floor);
  const int num_labels = NumLabels(config.variant);
  model.bounds = config.boundary_init.empty()
                     ? BoundarySet::Default(num_labels, config.boundary_mode)
                     : BoundarySet::FromValues(config.boundary_init,
                                               config.boundary_mode);

  Rng rng(MixSeed(seed, 0x1417u));
  RankHead& head = model.head;
  std::span<double> p = head.params();
  std::size_t fan_in = input_dim;
  for (std::size_t l = 0; l < head.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    const std::size_t width = config.hidden[l];
    for (std::size_t i = 0; i < width * fan_in; ++i) {
      p[head.weight_offset(l) + i] = rng.Uniform(-limit, limit);
    }
    fan_in = width;
  }
  // Scalar heads start flat: every item gets mu = sigma = 1. Random head
  // weights can put all items on the dead side of the output ReLU when the
  // features span few directions.
  p[head.mu_offset() + fan_in] = 1.0;
  p[head.sigma_offset() + fan_in] = 1.0;
  return model;
}

PreparedPairs PreparePairs(const ItemTable& items,
                           const std::vector<JudgmentRecord>& records,
                           Model& model, bool majority_filter,
                           bool add_judges) {
  std::vector<PairCounts> table = AggregateCounts(records);
  if (majority_filter) table = MajorityFilter(table);
  const int num_labels = model.num_labels();
  PreparedPairs prepared;
  for (PairCounts& pair : table) {
    PairObservation obs;
    obs.left = items.IndexOf(pair.left_item);
    obs.right = items.IndexOf(pair.right_item);
    if (num_labels == kNumFiveWayLabels) {
      obs.counts.assign(pair.counts.begin(), pair.counts.end());
    } else {
      obs.counts = {pair.counts[0] + pair.counts[1] + pair.counts[2],
                    pair.counts[3] + pair.counts[4]};
    }
    if (model.variant == Variant::kDarnV2) {
      for (const PairVote& vote : pair.votes) {
        const std::size_t judge = add_judges
                                      ? model.judges.Add(vote.judge_id)
                                      : model.judges.IndexOf(vote.judge_id);
        obs.votes.push_back({static_cast<std::uint32_t>(judge), vote.label});
      }
    }
    prepared.observations.push_back(std::move(obs));
    prepared.source.push_back(std::move(pair));
  }
  return prepared;
}

double EvaluateLoss(const Model& model, const FeatureMatrix& features,
                    const std::vector<PairObservation>& pairs) {
  return BatchObjectiveParallel(model, features, pairs, {}, nullptr);
}

double EvaluateLoss(const Dataset& data, const Checkpoint& checkpoint) {
  Model model = checkpoint.model;
  const PreparedPairs prepared =
      PreparePairs(data.items, data.judgments, model,
                   checkpoint.config.majority_filter, /*add_judges=*/false);
  if (prepared.observations.empty()) {
    throw DomainError("no pairs to evaluate");
  }
  return EvaluateLoss(model, data.items.features(), prepared.observations);
}

std::vector<ScoreDistribution> ScoreItems(const Model& model,
                                          const ItemTable& items) {
  if (items.size() > 0 && items.dim() != model.head.shape().input_dim) {
    throw ConfigError("item feature dimension " + std::to_string(items.dim()) +
                      " does not match model dimension " +
                      std::to_string(model.head.shape().input_dim));
  }
  return ScoreItemsParallel(model.head, items.features());
}

PairPredictions PredictPairs(const Model& model, const ItemTable& items,
                             const std::vector<JudgmentRecord>& records,
                             bool majority_filter) {
  std::vector<PairCounts> table = AggregateCounts(records);
  if (majority_filter) table = MajorityFilter(table);
  const std::vector<ScoreDistribution> scores = ScoreItems(model, items);
  PairPredictions out;
  for (const PairCounts& pair : table) {
    const ScoreDistribution& left = scores[items.IndexOf(pair.left_item)];
    const ScoreDistribution& right = scores[items.IndexOf(pair.right_item)];
    const PairScoreDiff diff = MakePairScoreDiff(left, right);
    int predicted;
    if (model.variant == Variant::kDarnV2 && !pair.votes.empty()) {
      std::vector<double> gammas;
      for (const PairVote& vote : pair.votes) {
        const auto judge = model.judges.Find(vote.judge_id);
        gammas.push_back(judge ? model.judges.gamma(*judge) : 1.0);
      }
      predicted = PredictLabelV2(diff, model.bounds.values(), gammas);
    } else {
      predicted = PredictLabel(diff, model.bounds.values());
    }
    out.predicted.push_back(predicted);
    out.truth.push_back(pair.counts);
    out.mu_left_right.emplace_back(left.mu, right.mu);
  }
  return out;
}

double ValidationAccuracy(const Model& model, const Dataset& data,
                          bool majority_filter) {
  const PairPredictions p =
      PredictPairs(model, data.items, data.judgments, majority_filter);
  if (p.predicted.empty()) throw DomainError("no validation pairs");
  if (model.num_labels() == kNumFiveWayLabels) {
    return FiveWayAccuracy(p.predicted, p.truth);
  }
  std::vector<int> truth;
  for (const LabelCounts& c : p.truth) {
    truth.push_back(BinaryFromFiveWay(ArgmaxLabel(c)));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (p.predicted[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, std::size_t size)
      : config_(config), m_(size, 0.0), v_(size, 0.0) {}

  void Step(Model& model, ModelGradient& grad) {
    ++t_;
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, t_);
    const double c2 = 1.0 - std::pow(b2, t_);
    const double lr = config_.learning_rate;
    std::vector<ParameterBlock> params = ParameterBlocks(model);
    std::vector<ParameterBlock> grads = ParameterBlocks(grad);
    std::size_t k = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
      std::span<double> p = params[b].values;
      std::span<const double> g = grads[b].values;
      for (std::size_t i = 0; i < p.size(); ++i, ++k) {
        if (config_.optimizer == OptimizerKind::kSgd) {
          p[i] -= lr * g[i];
          continue;
        }
        m_[k] = b1 * m_[k] + (1.0 - b1) * g[i];
        v_[k] = b2 * v_[k] + (1.0 - b2) * g[i] * g[i];
        p[i] -= lr * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + config_.adam_epsilon);
      }
    }
    model.bounds.Refresh();
  }

 private:
  const TrainConfig& config_;
  std::vector<double> m_;
  std::vector<double> v_;
  int t_ = 0;
};

}  // namespace

Checkpoint Train(const Dataset& train, const TrainConfig& config,
                 const TrainOptions& options) {
  config.Validate();
  if (train.judgments.empty() || train.items.size() == 0) {
    throw DomainError("training set is empty");
  }
  Checkpoint checkpoint;
  checkpoint.config = config;
  checkpoint.model = InitParams(config, train.items.dim(), config.seed);
  Model& model = checkpoint.model;
  if (options.validation != nullptr &&
      options.validation->items.dim() != train.items.dim()) {
    throw ConfigError("validation feature dimension " +
                      std::to_string(options.validation->items.dim()) +
                      " does not match training dimension " +
                      std::to_string(train.items.dim()));
  }
  const PreparedPairs prepared =
      PreparePairs(train.items, train.judgments, model, config.majority_filter,
                   /*add_judges=*/true);
  const std::vector<PairObservation>& pairs = prepared.observations;
  if (pairs.empty()) throw DomainError("no training pairs survive filtering");
  const FeatureMatrix& features = train.items.features();

  checkpoint.loss_history.push_back(EvaluateLoss(model, features, pairs));
  if (config.epochs == 0) return checkpoint;

  Rng rng(MixSeed(config.seed, 0x7a11u));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  ModelGradient grad = ModelGradient::ZerosLike(model);
  Optimizer optimizer(config, grad.size());
  std::vector<PairObservation> batch;
  std::vector<DropoutMask> masks;

  // Without validation data the lowest training loss seen at an epoch
  // boundary (initialization included) wins.
  std::optional<double> best_accuracy;
  double best_loss = checkpoint.loss_history.front();
  Model best_model = model;
  int stale_epochs = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(std::span<std::size_t>(order));
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      batch.clear();
      masks.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(pairs[order[i]]);
        if (config.dropout > 0.0) {
          masks.push_back(
              DrawDropoutMask(model.head.shape(), config.dropout, rng));
        }
      }
      grad.SetZero();
      double loss;
      try {
        loss = BatchObjectiveParallel(model, features, batch, masks, &grad,
                                      config.shard_size);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
      if (!std::isfinite(loss)) {
        throw NumericError("training loss is not finite at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      grad.Scale(1.0 / static_cast<double>(batch.size()));
      optimizer.Step(model, grad);
      try {
        model.bounds.CheckOrdered();
      } catch (const InvariantError& e) {
        throw NumericError("training diverged at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
      if (options.on_step) options.on_step(model);
    }

    EpochReport report;
    report.epoch = epoch;
    report.train_loss = EvaluateLoss(model, features, pairs);
    if (!std::isfinite(report.train_loss)) {
      throw NumericError("training loss is not finite after epoch " +
                         std::to_string(epoch));
    }
    checkpoint.loss_history.push_back(report.train_loss);
    checkpoint.epochs_run = epoch;

    bool stop = false;
    if (options.validation == nullptr && report.train_loss < best_loss) {
      best_loss = report.train_loss;
      best_model = model;
    }
    if (options.validation != nullptr) {
      const double accuracy =
          ValidationAccuracy(model, *options.validation, config.majority_filter);
      report.validation_accuracy = accuracy;
      if (!best_accuracy || accuracy > *best_accuracy) {
        best_accuracy = accuracy;
        best_model = model;
        stale_epochs = 0;
      } else if (++stale_epochs >= config.patience) {
        stop = true;
      }
    }
    if (options.on_epoch) options.on_epoch(report);
    if (stop) break;
  }
  model = std::move(best_model);
  return checkpoint;
}

}  // namespace pairrank
