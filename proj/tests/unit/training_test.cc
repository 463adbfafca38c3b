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
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pairrank/errors.h"
#include "pairrank/likelihood.h"
#include "pairrank/metrics.h"
#include "pairrank/simjudge.h"
#include "pairrank/training.h"

namespace pairrank {
namespace {

// Label of a noiseless judge: the bucket of (right - left) among bounds.
int ThresholdLabel(double left, double right, const std::vector<double>& bounds) {
  const double d = right - left;
  int label = 0;
  while (label < static_cast<int>(bounds.size()) && d > bounds[label]) ++label;
  return label;
}

// Twenty items whose single feature is their true score; every pair is
// labelled once by the threshold rule.
Dataset PlantedLine() {
  Dataset data;
  Rng rng(2024);
  std::vector<double> truth;
  for (int i = 0; i < 20; ++i) {
    const double s = rng.Uniform(0.0, 4.0);
    truth.push_back(s);
    data.items.Add({"i" + std::to_string(i), "q", {s}});
  }
  const std::vector<double> bounds = {-1.5, -0.5, 0.5, 1.5};
  int n = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) {
      data.judgments.push_back(MakeJudgment(
          "p" + std::to_string(n++), "q", "i" + std::to_string(i), "i" + std::to_string(j),
          "oracle", ThresholdLabel(truth[i], truth[j], bounds), false));
    }
  }
  return data;
}

TrainConfig SmallConfig() {
  TrainConfig config;
  config.hidden = {16, 16, 16};
  config.dropout = 0.0;
  config.batch_size = 16;
  config.epochs = 3;
  config.majority_filter = false;
  config.seed = 3;
  return config;
}

Dataset PlantedV2() {
  PlantSpec spec;
  spec.num_items = 16;
  spec.judge_gammas = {0.5, 1.0, 2.0};
  spec.seed = 4;
  const PlantedWorld world = PlantWorld(spec);
  return {world.Features(), GenerateDataset(world, 2, 3, 8)};
}

// ---------------------------------------------------------------- config

TEST(ConfigTest, DefaultsValidateAndRoundTrip) {
  TrainConfig config;
  EXPECT_NO_THROW(config.Validate());
  config.variant = Variant::kDarnV2;
  config.boundary_init = {-2.0, -1.0, 1.0, 2.0};
  config.hidden = {7, 5};
  config.learning_rate = 0.0125;
  std::ostringstream out;
  WriteConfig(out, config);
  std::istringstream in(out.str());
  const TrainConfig back = ParseConfig(in);
  std::ostringstream again;
  WriteConfig(again, back);
  EXPECT_EQ(again.str(), out.str());
  for (const std::string& key : ConfigKeys()) {
    EXPECT_EQ(GetConfigValue(back, key), GetConfigValue(config, key)) << key;
  }
}

TEST(ConfigTest, InvalidValuesNameTheKey) {
  auto expect_key = [](TrainConfig c, const std::string& key) {
    try {
      c.Validate();
      FAIL() << key;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
  };
  TrainConfig c;
  c.learning_rate = 0.0;
  expect_key(c, "learning_rate");
  c = {};
  c.batch_size = 0;
  expect_key(c, "batch_size");
  c = {};
  c.dropout = 1.0;
  expect_key(c, "dropout");
  c = {};
  c.boundary_init = {0.0, 1.0};
  expect_key(c, "boundary_init");
  c = {};
  c.variant = Variant::kDarnBinary;
  c.boundary_init = {-1.5, -0.5, 0.5, 1.5};
  expect_key(c, "boundary_init");
}

TEST(ConfigTest, ParseErrorsCarryLines) {
  std::istringstream in("# comment\nepochs = 4\nlearning_rate = fast\n");
  try {
    ParseConfig(in, "train.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.cfg:3"), std::string::npos) << e.what();
  }
  std::istringstream unknown("colour = red\n");
  EXPECT_THROW(ParseConfig(unknown), ConfigError);
  TrainConfig c;
  EXPECT_THROW(SetConfigValue(c, "variant", "darn7"), ConfigError);
  SetConfigValue(c, "variant", "darn-binary");
  EXPECT_EQ(c.variant, Variant::kDarnBinary);
}

// ------------------------------------------------------------------ init

TEST(InitTest, DefaultBoundariesPerVariant) {
  TrainConfig c;
  EXPECT_EQ(InitParams(c, 3, 1).bounds.values(), (std::vector<double>{-1.5, -0.5, 0.5, 1.5}));
  c.variant = Variant::kDarnBinary;
  EXPECT_EQ(InitParams(c, 3, 1).bounds.values(), std::vector<double>{0.0});
}

TEST(InitTest, SeedsChangeWeightsOnly) {
  TrainConfig c = SmallConfig();
  const Model a = InitParams(c, 4, 1);
  const Model b = InitParams(c, 4, 2);
  const Model a2 = InitParams(c, 4, 1);
  EXPECT_NE(std::vector<double>(a.head.params().begin(), a.head.params().end()),
            std::vector<double>(b.head.params().begin(), b.head.params().end()));
  EXPECT_EQ(std::vector<double>(a.head.params().begin(), a.head.params().end()),
            std::vector<double>(a2.head.params().begin(), a2.head.params().end()));
  EXPECT_EQ(a.bounds.values(), b.bounds.values());
  EXPECT_TRUE(a.judges.empty());
  const double limit = std::sqrt(6.0 / 4.0);
  for (std::size_t i = 0; i < 16 * 4; ++i) EXPECT_LE(std::fabs(a.head.params()[i]), limit);
}

// -------------------------------------------------------------- training

TEST(TrainTest, ZeroEpochsReturnsInitialization) {
  const Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.epochs = 0;
  const Checkpoint ckpt = Train(data, c);
  Checkpoint init;
  init.config = c;
  init.model = InitParams(c, 1, c.seed);
  init.loss_history = ckpt.loss_history;
  EXPECT_EQ(SerializeCheckpoint(ckpt), SerializeCheckpoint(init));
  EXPECT_EQ(ckpt.loss_history.size(), 1u);
}

TEST(TrainTest, SameSeedSameBytes) {
  const Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.dropout = 0.3;
  EXPECT_EQ(SerializeCheckpoint(Train(data, c)), SerializeCheckpoint(Train(data, c)));
  TrainConfig other = c;
  other.seed = 4;
  EXPECT_NE(SerializeCheckpoint(Train(data, c)), SerializeCheckpoint(Train(data, other)));
}

TEST(TrainTest, PlantedLineIsRecoveredExactly) {
  const Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.hidden = {32, 32, 32};
  c.epochs = 300;
  int steps = 0;
  TrainOptions options;
  options.on_step = [&](const Model& m) {
    ++steps;
    EXPECT_NO_THROW(m.bounds.CheckOrdered());
  };
  const Checkpoint ckpt = Train(data, c, options);
  ASSERT_GE(ckpt.loss_history.size(), 2u);
  EXPECT_LE(ckpt.loss_history[1], 0.99 * ckpt.loss_history[0]);
  EXPECT_EQ(steps, 300 * 12);  // 190 pairs in batches of 16
  std::vector<double> truth, mu;
  const auto scores = ScoreItems(ckpt.model, data.items);
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    truth.push_back(data.items.features().row(i)[0]);
    mu.push_back(scores[i].mu);
  }
  EXPECT_EQ(Srcc(truth, mu), 1.0);
  EXPECT_LE(EvaluateLoss(data, ckpt), ckpt.loss_history.front());
}

TEST(TrainTest, FinalLossNeverAboveInitial) {
  const Dataset data = PlantedV2();
  for (Variant v : {Variant::kDarn5, Variant::kDarnBinary, Variant::kDarnV2}) {
    TrainConfig c = SmallConfig();
    c.variant = v;
    c.dropout = 0.5;
    c.learning_rate = 0.05;  // deliberately aggressive
    const Checkpoint ckpt = Train(data, c);
    EXPECT_LE(EvaluateLoss(data, ckpt), ckpt.loss_history.front()) << VariantName(v);
  }
}

TEST(TrainTest, V2LearnsJudgeTable) {
  const Dataset data = PlantedV2();
  TrainConfig c = SmallConfig();
  c.variant = Variant::kDarnV2;
  const Checkpoint ckpt = Train(data, c);
  EXPECT_EQ(ckpt.model.judges.size(), 3u);
  EXPECT_TRUE(ckpt.model.judges.Find("j2").has_value());
}

TEST(TrainTest, ValidationReportsAccuracy) {
  const Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.epochs = 4;
  c.patience = 1;
  std::vector<EpochReport> reports;
  TrainOptions options;
  options.validation = &data;
  options.on_epoch = [&](const EpochReport& r) { reports.push_back(r); };
  const Checkpoint ckpt = Train(data, c, options);
  ASSERT_FALSE(reports.empty());
  for (const EpochReport& r : reports) {
    ASSERT_TRUE(r.validation_accuracy.has_value());
    EXPECT_GE(*r.validation_accuracy, 0.0);
    EXPECT_LE(*r.validation_accuracy, 1.0);
  }
  EXPECT_EQ(ckpt.epochs_run, static_cast<int>(reports.size()));
}

TEST(TrainTest, Errors) {
  TrainConfig c = SmallConfig();
  EXPECT_THROW(Train(Dataset{}, c), DomainError);
  const Dataset data = PlantedLine();
  Dataset wide;
  wide.items.Add({"x", "q", {1.0, 2.0}});
  TrainOptions options;
  options.validation = &wide;
  EXPECT_THROW(Train(data, c, options), ConfigError);
  c.batch_size = 0;
  EXPECT_THROW(Train(data, c), ConfigError);
}

TEST(TrainTest, DivergenceNamesTheBatch) {
  const Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.optimizer = OptimizerKind::kSgd;
  c.learning_rate = 1e300;
  c.batch_size = 1;
  try {
    Train(data, c);
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos) << e.what();
  }
}

// ------------------------------------------------------------ evaluation

TEST(EvaluateTest, RepeatableAndEqualToCostOnOnePair) {
  Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.epochs = 1;
  c.dropout = 0.5;
  const Checkpoint ckpt = Train(data, c);
  EXPECT_EQ(EvaluateLoss(data, ckpt), EvaluateLoss(data, ckpt));

  Dataset one;
  one.items = data.items;
  one.judgments = {data.judgments[7]};
  const auto scores = ScoreItems(ckpt.model, data.items);
  const JudgmentRecord& r = one.judgments[0];
  const PairScoreDiff diff = MakePairScoreDiff(scores[data.items.IndexOf(r.left_item)],
                                               scores[data.items.IndexOf(r.right_item)]);
  std::vector<int> counts(5, 0);
  counts[r.label] = 1;
  const std::vector<CountedPair> pair = {{diff, counts}};
  EXPECT_NEAR(EvaluateLoss(one, ckpt), DarnCost(pair, ckpt.model.bounds.values()), 1e-12);
}

TEST(EvaluateTest, Darn5IgnoresJudgeIds) {
  Dataset data = PlantedLine();
  TrainConfig c = SmallConfig();
  c.epochs = 1;
  const Checkpoint ckpt = Train(data, c);
  const double before = EvaluateLoss(data, ckpt);
  for (JudgmentRecord& r : data.judgments) r.judge_id = "stranger";
  EXPECT_EQ(EvaluateLoss(data, ckpt), before);
}

TEST(EvaluateTest, V2RejectsUnknownJudges) {
  Dataset data = PlantedV2();
  TrainConfig c = SmallConfig();
  c.variant = Variant::kDarnV2;
  c.epochs = 1;
  const Checkpoint ckpt = Train(data, c);
  data.judgments[0].judge_id = "stranger";
  EXPECT_THROW(EvaluateLoss(data, ckpt), LookupError);
  EXPECT_NO_THROW(PredictPairs(ckpt.model, data.items, data.judgments, false));
}

TEST(PrepareTest, BinaryCollapsesFiveWayCounts) {
  Dataset data;
  data.items.Add({"a", "q", {0.0}});
  data.items.Add({"b", "q", {1.0}});
  for (int label = 0; label < 5; ++label) {
    data.judgments.push_back(MakeJudgment("p", "q", "a", "b", "j" + std::to_string(label), label, false));
  }
  TrainConfig c = SmallConfig();
  c.variant = Variant::kDarnBinary;
  Model model = InitParams(c, 1, 1);
  const PreparedPairs prepared = PreparePairs(data.items, data.judgments, model, false, false);
  ASSERT_EQ(prepared.observations.size(), 1u);
  EXPECT_EQ(prepared.observations[0].counts, (std::vector<int>{3, 2}));
  EXPECT_TRUE(PreparePairs(data.items, data.judgments, model, true, false).observations.empty());
}

TEST(PrepareTest, V2JudgesAddedOnlyWhenAllowed) {
  Dataset data;
  data.items.Add({"a", "q", {0.0}});
  data.items.Add({"b", "q", {1.0}});
  data.judgments = {MakeJudgment("p", "q", "a", "b", "r1", 1, false)};
  TrainConfig c = SmallConfig();
  c.variant = Variant::kDarnV2;
  Model model = InitParams(c, 1, 1);
  EXPECT_THROW(PreparePairs(data.items, data.judgments, model, false, false), LookupError);
  const auto prepared = PreparePairs(data.items, data.judgments, model, false, true);
  EXPECT_EQ(model.judges.size(), 1u);
  ASSERT_EQ(prepared.observations[0].votes.size(), 1u);
  EXPECT_EQ(prepared.observations[0].votes[0].label, 1);
}

TEST(ScoreItemsTest, DimensionMismatch) {
  TrainConfig c = SmallConfig();
  const Model model = InitParams(c, 3, 1);
  ItemTable items;
  items.Add({"a", "q", {1.0}});
  EXPECT_THROW(ScoreItems(model, items), ConfigError);
}

// ------------------------------------------------------------ checkpoints

TEST(CheckpointTest, ByteIdenticalRoundTrip) {
  const Dataset data = PlantedV2();
  TrainConfig c = SmallConfig();
  c.variant = Variant::kDarnV2;
  c.boundary_mode = BoundaryMode::kAntisymmetric;
  c.epochs = 2;
  const Checkpoint ckpt = Train(data, c);
  const std::string text = SerializeCheckpoint(ckpt);
  EXPECT_EQ(text.rfind(kCheckpointPragma, 0), 0u);
  std::istringstream in(text);
  const Checkpoint back = ParseCheckpoint(in);
  EXPECT_EQ(SerializeCheckpoint(back), text);
  EXPECT_EQ(back.epochs_run, ckpt.epochs_run);
  EXPECT_EQ(back.loss_history, ckpt.loss_history);
  EXPECT_EQ(EvaluateLoss(data, back), EvaluateLoss(data, ckpt));
}

TEST(CheckpointTest, MalformedFilesNameTheLine) {
  TrainConfig c = SmallConfig();
  Checkpoint ckpt;
  ckpt.config = c;
  ckpt.model = InitParams(c, 2, 1);
  std::string text = SerializeCheckpoint(ckpt);
  const std::size_t pos = text.find("head_params");
  const std::size_t line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n')) + 2;
  const std::size_t eol = text.find('\n', pos);
  const std::size_t next_eol = text.find('\n', eol + 1);
  text.replace(eol + 1, next_eol - eol - 1, "1 2 oops");
  std::istringstream in(text);
  try {
    ParseCheckpoint(in, "ck.txt");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("ck.txt:" + std::to_string(line)), std::string::npos)
        << e.what();
  }
  std::istringstream wrong("#pairrank-checkpoint v2\n");
  EXPECT_THROW(ParseCheckpoint(wrong), DataError);
}

}  // namespace
}  // namespace pairrank
