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

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles/oracles.h"
#include "pairrank/errors.h"
#include "pairrank/simjudge.h"

namespace pairrank {
namespace {

PlantedWorld TwoItemWorld(double delta_mu, std::vector<double> bounds,
                          std::vector<PlantedJudge> judges) {
  return PlantedWorld({{"l", "q", 1.0, 0.5}, {"r", "q", 1.0 + delta_mu, 0.5}},
                      std::move(bounds), std::move(judges), 3);
}

std::vector<PairSpec> HundredPairs() {
  std::vector<PairSpec> pairs;
  for (int i = 0; i < 100; ++i) {
    pairs.push_back({"p" + std::to_string(i), "q0", "i" + std::to_string(i % 10),
                     "i" + std::to_string(10 + i % 10)});
  }
  return pairs;
}

PlantSpec TwentyItems() {
  PlantSpec spec;
  spec.num_items = 20;
  spec.seed = 9;
  return spec;
}

TEST(PlantedLabelTest, ProbabilitiesMatchQuadrature) {
  const std::vector<double> bounds = {-1.5, -0.5, 0.5, 1.5};
  const PlantedWorld world = TwoItemWorld(0.7, bounds, {{"a", 1.0}, {"b", 2.0}});
  const auto pa = PlantedLabelProbs(world, "l", "r", "a");
  const auto pb = PlantedLabelProbs(world, "l", "r", "b");
  const auto wa = oracle::LabelProbs(0.7, 0.5, bounds);
  const auto wb = oracle::LabelProbs(0.7, 0.5, {-3.0, -1.0, 1.0, 3.0});
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(pa[j], wa[j], 1e-12);
    EXPECT_NEAR(pb[j], wb[j], 1e-12);
  }
}

TEST(PlantedLabelTest, SaturatedWorldAlwaysRightBetter) {
  const PlantedWorld world = TwoItemWorld(100.0, {-1e-6, 0.0, 1e-6, 2e-6}, {{"a", 1.0}});
  for (std::uint64_t d = 0; d < 1000; ++d) EXPECT_EQ(SampleLabel(world, "l", "r", "a", d), 4);
}

TEST(PlantedLabelTest, UnitGammaJudgesAgree) {
  const PlantedWorld world = TwoItemWorld(0.3, {-1.5, -0.5, 0.5, 1.5}, {{"a", 1.0}, {"b", 1.0}});
  EXPECT_EQ(PlantedLabelProbs(world, "l", "r", "a"), PlantedLabelProbs(world, "l", "r", "b"));
}

TEST(PlantedLabelTest, DrawsArePureFunctions) {
  const PlantedWorld world = TwoItemWorld(0.0, {-1.5, -0.5, 0.5, 1.5}, {{"a", 1.0}});
  for (std::uint64_t d = 0; d < 100; ++d) {
    EXPECT_EQ(SampleLabel(world, "l", "r", "a", d), SampleLabel(world, "l", "r", "a", d));
  }
}

TEST(PlantedLabelTest, UnknownIds) {
  const PlantedWorld world = TwoItemWorld(0.0, {-1.5, -0.5, 0.5, 1.5}, {{"a", 1.0}});
  EXPECT_THROW(SampleLabel(world, "l", "zz", "a", 0), LookupError);
  EXPECT_THROW(SampleLabel(world, "l", "r", "zz", 0), LookupError);
  EXPECT_THROW(world.item("nope"), LookupError);
}

TEST(GenerateTest, CountsAndDistinctJudges) {
  const PlantedWorld world = PlantWorld(TwentyItems());
  const auto records = GenerateJudgments(world, HundredPairs(), 5);
  EXPECT_EQ(records.size(), 500u);
  std::set<std::pair<std::string, std::string>> seen;
  for (const JudgmentRecord& r : records) {
    EXPECT_TRUE(seen.emplace(r.pair_id, r.judge_id).second);
  }
  EXPECT_EQ(GenerateJudgments(world, HundredPairs(), 5), records);
  EXPECT_THROW(GenerateJudgments(world, HundredPairs(), 7), DomainError);
}

TEST(GenerateTest, DatasetIsDeterministic) {
  const PlantedWorld world = PlantWorld(TwentyItems());
  const auto a = GenerateDataset(world, 2, 3, 11);
  const auto b = GenerateDataset(world, 2, 3, 11);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 2u * 10u * 3u);
}

TEST(PlantTest, SpecShapesTheWorld) {
  PlantSpec spec = TwentyItems();
  spec.num_queries = 3;
  spec.judge_gammas = {0.5, 2.0};
  const PlantedWorld world = PlantWorld(spec);
  ASSERT_EQ(world.items().size(), 20u);
  EXPECT_EQ(world.items()[4].query_id, "q1");
  for (const PlantedItem& item : world.items()) {
    EXPECT_GE(item.mu, spec.mu_min);
    EXPECT_LE(item.mu, spec.mu_max);
  }
  EXPECT_EQ(world.judge("j1").gamma, 2.0);
  const ItemTable features = world.Features();
  EXPECT_EQ(features.size(), 20u);
  EXPECT_EQ(features.dim(), 8u);
}

TEST(PlantTest, WorldFileRoundTrip) {
  PlantSpec spec = TwentyItems();
  spec.judge_gammas = {0.5, 1.0, 2.0};
  const PlantedWorld world = PlantWorld(spec);
  std::ostringstream out;
  WriteWorld(out, world);
  std::istringstream in(out.str());
  const PlantedWorld back = ReadWorld(in);
  std::ostringstream again;
  WriteWorld(again, back);
  EXPECT_EQ(again.str(), out.str());
  const ItemTable a = world.Features();
  const ItemTable b = back.Features();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t c = 0; c < a.dim(); ++c) {
      EXPECT_EQ(a.features().row(i)[c], b.features().row(i)[c]);
    }
  }
}

TEST(PlantTest, WorldFileErrors) {
  std::istringstream bad("#pairrank-world v1\nseed 1\nbounds 1 0\n");
  EXPECT_THROW(ReadWorld(bad), Error);
  std::istringstream gamma("#pairrank-world v1\nseed 1\nbounds 0\njudge a -1\n");
  EXPECT_THROW(ReadWorld(gamma), Error);
}

TEST(HeldOutTest, FreshItemsShareTheEmbedding) {
  const PlantedWorld world = PlantWorld(TwentyItems());
  const HeldOutSet held = DrawHeldOutItems(world, 30, 0.0, 4.0, 5);
  ASSERT_EQ(held.items.size(), 30u);
  ASSERT_EQ(held.mu.size(), 30u);
  EXPECT_EQ(held.items.dim(), world.feature_dim());
  EXPECT_EQ(held.items.item_id(0), "h0");
}

}  // namespace
}  // namespace pairrank
