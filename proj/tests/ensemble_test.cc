//
// Copyright 2026 The privtree Authors.
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

#include "privtree/ensemble.h"

#include <cmath>
#include <numeric>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "tests/testing/oracles.h"

namespace privtree {
namespace {

using ::privtree::testing::MakeCategorical;
using ::privtree::testing::RandomDataset;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

Dataset LabelIsA() {
  return MakeCategorical(
      {{0, 0}, {0, 1}, {0, 2}, {0, 0}, {1, 1}, {1, 2}, {1, 0}, {1, 1}},
      {0, 0, 0, 0, 1, 1, 1, 1}, {2, 3}, 2, {"A", "B"});
}

// Two trees that split on different features of a 2-feature dataset.
std::pair<DecisionTree, DecisionTree> SingleFeatureTrees() {
  const Dataset data = MakeCategorical({{0, 0}, {1, 1}, {0, 1}, {1, 0}},
                                       {0, 1, 0, 1}, {2, 2}, 2, {"A", "B"});
  auto on_a = DecisionTree::Train(data, {}, {});
  auto on_b =
      DecisionTree::Train(MakeCategorical({{0, 0}, {1, 1}, {0, 1}, {1, 0}},
                                          {0, 1, 1, 0}, {2, 2}, 2, {"A", "B"}),
                          {}, {});
  return {*on_a, *on_b};
}

TEST(ForestTest, SingleTreeForestEqualsDecisionTree) {
  const Dataset data = RandomDataset(3, {.rows = 90, .features = 5});
  EnsembleConfig config;
  config.n_trees = 1;
  config.bootstrap = false;
  config.feature_subsample = 0;
  auto forest = TrainForest(data, {}, config);
  auto tree = DecisionTree::Train(data, {}, {});
  ASSERT_TRUE(forest.ok() && tree.ok());
  EXPECT_EQ(forest->trees().front().nodes(), tree->nodes());
  config.feature_subsample = 5;
  forest = TrainForest(data, {}, config);
  ASSERT_TRUE(forest.ok());
  EXPECT_EQ(forest->trees().front().nodes(), tree->nodes());
}

TEST(ForestTest, DefaultsFollowSquareRootRule) {
  const EnsembleConfig config = EnsembleConfig::ForestDefaults();
  EXPECT_EQ(config.n_trees, 100);
  EXPECT_TRUE(config.bootstrap);
  EXPECT_FALSE(config.base.max_depth.has_value());
  EXPECT_EQ(config.ResolvedSubsample(8), 3);
  EXPECT_EQ(config.ResolvedSubsample(9), 3);
  EXPECT_EQ(config.ResolvedSubsample(1), 1);
}

TEST(ForestTest, ZeroBudgetHoldsInEveryTree) {
  const Dataset data = LabelIsA();
  SensitivitySpec spec;
  spec.features["A"].split_budget = 0;
  EnsembleConfig config;
  config.n_trees = 20;
  config.base.growth_order = GrowthOrder::kBreadthFirst;
  auto forest = TrainForest(data, spec, config);
  ASSERT_TRUE(forest.ok()) << forest.status();
  for (const DecisionTree& tree : forest->trees()) {
    EXPECT_EQ(tree.SplitCounts()[0], 0);
  }
  EXPECT_EQ(forest->Importance()[0], 0.0);
  EXPECT_TRUE(forest->AuditConstraints().ok());
}

TEST(ForestTest, SubsampleLargerThanFeatureCountIsError) {
  EnsembleConfig config;
  config.feature_subsample = 3;
  EXPECT_FALSE(TrainForest(LabelIsA(), {}, config).ok());
  config.feature_subsample = 2;
  config.n_trees = 0;
  EXPECT_FALSE(TrainForest(LabelIsA(), {}, config).ok());
}

TEST(ForestTest, DeterministicAndSeedSensitive) {
  const Dataset data = RandomDataset(8, {.rows = 120, .features = 6});
  EnsembleConfig config;
  config.n_trees = 15;
  config.seed = 99;
  auto a = TrainForest(data, {}, config);
  auto b = TrainForest(data, {}, config);
  config.seed = 100;
  auto c = TrainForest(data, {}, config);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  bool all_same = true;
  for (int t = 0; t < 15; ++t) {
    EXPECT_EQ(a->trees()[t].nodes(), b->trees()[t].nodes());
    all_same = all_same && a->trees()[t].nodes() == c->trees()[t].nodes();
  }
  EXPECT_FALSE(all_same);
}

TEST(ForestTest, ImportanceSumsToOneAndAuditsPass) {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    const Dataset data = RandomDataset(
        seed, {.rows = 80, .features = 4, .classes = 3, .numeric = true});
    SensitivitySpec spec;
    spec.features["f0"] = {
        .weight = 0.5, .level_threshold = 1, .split_budget = 2};
    EnsembleConfig config;
    config.n_trees = 10;
    config.seed = seed;
    config.base.growth_order = GrowthOrder::kBreadthFirst;
    auto forest = TrainForest(data, spec, config);
    ASSERT_TRUE(forest.ok());
    EXPECT_TRUE(forest->AuditConstraints().ok());
    const ImportanceVector importance = forest->Importance();
    EXPECT_NEAR(std::accumulate(importance.values.begin(),
                                importance.values.end(), 0.0),
                1.0, 1e-9);
  }
}

TEST(AdaBoostTest, SeparableDataNeedsOneTree) {
  const Dataset data = LabelIsA();
  EnsembleConfig config = EnsembleConfig::AdaBoostDefaults();
  config.base.max_depth.reset();
  auto model = TrainAdaBoost(data, {}, config);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_EQ(model->trees().size(), 1u);
  EXPECT_GT(model->tree_weights()[0], 20.0);
  EXPECT_EQ(*model->Accuracy(data), 1.0);
}

TEST(AdaBoostTest, BinaryStageWeightDropsClassTerm) {
  const Dataset data = RandomDataset(4, {.rows = 100, .signal = 0.5});
  EnsembleConfig config = EnsembleConfig::AdaBoostDefaults();
  config.base.max_depth = 1;
  config.n_trees = 5;
  auto model = TrainAdaBoost(data, {}, config);
  ASSERT_TRUE(model.ok()) << model.status();
  ASSERT_GE(model->trees().size(), 1u);
  for (size_t t = 0; t < model->trees().size(); ++t) {
    const double err = model->stage_errors()[t];
    EXPECT_NEAR(model->tree_weights()[t], std::log((1.0 - err) / err), 1e-12);
  }
}

TEST(AdaBoostTest, MulticlassStageWeightAndErrorBound) {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const Dataset data =
        RandomDataset(seed, {.rows = 150, .features = 4, .classes = 4});
    EnsembleConfig config = EnsembleConfig::AdaBoostDefaults();
    config.n_trees = 10;
    config.seed = seed;
    auto model = TrainAdaBoost(data, {}, config);
    ASSERT_TRUE(model.ok()) << model.status();
    for (size_t t = 0; t < model->trees().size(); ++t) {
      const double err = model->stage_errors()[t];
      EXPECT_LT(err, 1.0 - 1.0 / 4);
      EXPECT_NEAR(model->tree_weights()[t],
                  std::log((1.0 - err) / err) + std::log(3.0), 1e-12);
    }
  }
}

TEST(AdaBoostTest, ChanceLevelFirstStageIsError) {
  const Dataset data =
      MakeCategorical({{0}, {0}, {0}, {0}}, {0, 1, 0, 1}, {1}, 2);
  const auto status =
      TrainAdaBoost(data, {}, EnsembleConfig::AdaBoostDefaults()).status();
  EXPECT_EQ(status.code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(status.message(), HasSubstr("no better than chance"));
}

TEST(AdaBoostTest, ConstraintsApplyPerStage) {
  const Dataset data = RandomDataset(21, {.rows = 120, .features = 4});
  SensitivitySpec spec;
  spec.features["f0"].split_budget = 1;
  spec.features["f1"].level_threshold = 2;
  EnsembleConfig config = EnsembleConfig::AdaBoostDefaults();
  config.base.growth_order = GrowthOrder::kBreadthFirst;
  auto model = TrainAdaBoost(data, spec, config);
  ASSERT_TRUE(model.ok()) << model.status();
  EXPECT_TRUE(model->AuditConstraints().ok());
}

TEST(EnsemblePredictTest, SingleTreeMatchesTree) {
  const Dataset data = RandomDataset(6, {.rows = 60});
  auto tree = DecisionTree::Train(data, {}, {});
  ASSERT_TRUE(tree.ok());
  auto model = EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                        {*tree}, {1.0});
  ASSERT_TRUE(model.ok());
  for (size_t r = 0; r < data.num_rows(); ++r) {
    EXPECT_EQ(*model->Predict(data.row(r)), *tree->Predict(data.row(r)));
  }
  const ImportanceVector a = model->Importance(), b = tree->Importance();
  for (size_t f = 0; f < a.size(); ++f) EXPECT_NEAR(a[f], b[f], 1e-15);
}

TEST(EnsemblePredictTest, MajorityVoteAndTies) {
  const Dataset data = MakeCategorical({{0}, {1}}, {0, 1}, {2}, 2);
  const Dataset flipped = MakeCategorical({{0}, {1}}, {1, 0}, {2}, 2);
  auto t = DecisionTree::Train(data, {}, {});
  auto f = DecisionTree::Train(flipped, {}, {});
  ASSERT_TRUE(t.ok() && f.ok());
  auto two_one = EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                          {*t, *f, *t}, {1, 1, 1});
  ASSERT_TRUE(two_one.ok());
  EXPECT_EQ(*two_one->Predict(std::vector<double>{0}), 0);
  EXPECT_EQ(*two_one->Predict(std::vector<double>{1}), 1);
  auto tied = EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                       {*t, *f}, {1, 1});
  ASSERT_TRUE(tied.ok());
  EXPECT_EQ(*tied->Predict(std::vector<double>{1}), 0);
  EXPECT_FALSE(tied->Predict(std::vector<double>{1, 1}).ok());
}

TEST(EnsemblePredictTest, InvariantUnderWeightRescaling) {
  const Dataset data = RandomDataset(12, {.rows = 200, .classes = 3});
  EnsembleConfig config = EnsembleConfig::AdaBoostDefaults();
  config.n_trees = 12;
  auto model = TrainAdaBoost(data, {}, config);
  ASSERT_TRUE(model.ok());
  std::vector<double> scaled = model->tree_weights();
  for (double& w : scaled) w *= 7.0;
  auto rescaled =
      EnsembleModel::FromParts(model->ensemble_kind(), model->config(),
                               model->sensitivity(), model->trees(), scaled);
  ASSERT_TRUE(rescaled.ok());
  EXPECT_EQ(*rescaled->PredictAll(data), *model->PredictAll(data));
}

TEST(EnsembleImportanceTest, AveragesNormalizedVectors) {
  auto [on_a, on_b] = SingleFeatureTrees();
  ASSERT_THAT(on_a.Importance().values, ElementsAre(1.0, 0.0));
  ASSERT_THAT(on_b.Importance().values, ElementsAre(0.0, 1.0));
  auto model = EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                        {on_a, on_b}, {1.0, 1.0});
  ASSERT_TRUE(model.ok());
  EXPECT_THAT(model->Importance().values,
              ElementsAre(DoubleNear(0.5, 1e-15), DoubleNear(0.5, 1e-15)));
}

TEST(EnsembleImportanceTest, SingleLeafTreesContributeZero) {
  auto [on_a, unused] = SingleFeatureTrees();
  const Dataset constant =
      MakeCategorical({{0, 0}, {1, 1}}, {1, 1}, {2, 2}, 2, {"A", "B"});
  auto leaf = DecisionTree::Train(constant, {}, {});
  ASSERT_TRUE(leaf.ok());
  auto model = EnsembleModel::FromParts(EnsembleKind::kAdaBoost, {}, {},
                                        {on_a, *leaf}, {1.0, 3.0});
  ASSERT_TRUE(model.ok());
  EXPECT_THAT(model->Importance().values, ElementsAre(1.0, 0.0));
}

TEST(FromPartsTest, RejectsBadWeights) {
  auto [on_a, on_b] = SingleFeatureTrees();
  EXPECT_FALSE(EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                        {on_a}, {0.0})
                   .ok());
  EXPECT_FALSE(EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                        {on_a, on_b}, {1.0, -1.0})
                   .ok());
  EXPECT_FALSE(EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {},
                                        {on_a}, {1.0, 1.0})
                   .ok());
  EXPECT_FALSE(
      EnsembleModel::FromParts(EnsembleKind::kRandomForest, {}, {}, {}, {})
          .ok());
}

}  // namespace
}  // namespace privtree
