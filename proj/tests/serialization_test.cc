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

#include "privtree/serialization.h"

#include <filesystem>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "tests/testing/oracles.h"

namespace privtree {
namespace {

using ::privtree::testing::RandomDataset;
using ::testing::HasSubstr;

SensitivitySpec SomeSpec() {
  SensitivitySpec spec;
  spec.features["f0"] = {.weight = 0.3, .level_threshold = 1};
  spec.features["f1"] = {.weight = 0.0, .split_budget = 2};
  return spec;
}

TEST(TreeSerializationTest, RoundTripIsByteIdentical) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset data = RandomDataset(
        seed, {.rows = 70, .features = 3, .classes = 3, .numeric = true});
    TreeConfig config;
    config.growth_order = GrowthOrder::kBreadthFirst;
    config.criterion =
        seed % 2 ? SplitCriterion::kGini : SplitCriterion::kEntropy;
    if (seed % 3 == 0) config.max_depth = 4;
    config.seed = seed;
    auto tree = DecisionTree::Train(data, SomeSpec(), config);
    ASSERT_TRUE(tree.ok());
    const std::string text = SerializeTree(*tree);
    auto loaded = ParseTree(text);
    ASSERT_TRUE(loaded.ok()) << loaded.status();
    EXPECT_EQ(SerializeTree(*loaded), text);
    EXPECT_EQ(loaded->nodes(), tree->nodes());
    EXPECT_EQ(loaded->config(), tree->config());
    EXPECT_EQ(loaded->sensitivity(), tree->sensitivity());
    EXPECT_EQ(*loaded->PredictAll(data), *tree->PredictAll(data));
    EXPECT_EQ(loaded->Importance().values, tree->Importance().values);
  }
}

TEST(TreeSerializationTest, TrainingTwiceGivesIdenticalBytes) {
  const Dataset data = RandomDataset(4, {.rows = 90, .numeric = true});
  TreeConfig config;
  config.growth_order = GrowthOrder::kBreadthFirst;
  config.feature_subsample = 2;
  config.seed = 17;
  auto a = DecisionTree::Train(data, SomeSpec(), config);
  auto b = DecisionTree::Train(data, SomeSpec(), config);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(SerializeTree(*a), SerializeTree(*b));
}

TEST(TreeSerializationTest, DocumentLayout) {
  const Dataset data = RandomDataset(1, {.rows = 30});
  auto tree = DecisionTree::Train(data, {}, {});
  ASSERT_TRUE(tree.ok());
  const auto j = nlohmann::json::parse(SerializeTree(*tree));
  EXPECT_EQ(j["format"], "privtree-model");
  EXPECT_EQ(j["version"], kModelFormatVersion);
  EXPECT_EQ(j["kind"], "decision_tree");
  EXPECT_EQ(j["config"]["criterion"], "entropy");
  ASSERT_EQ(j["nodes"].size(), tree->nodes().size());
  EXPECT_EQ(j["nodes"][0]["n_samples"], 30.0);
  EXPECT_TRUE(j["nodes"][0].contains("class_counts"));
}

TEST(TreeSerializationTest, RejectsVersionMismatch) {
  const Dataset data = RandomDataset(1, {.rows = 30});
  auto tree = DecisionTree::Train(data, {}, {});
  auto j = nlohmann::json::parse(SerializeTree(*tree));
  j["version"] = 99;
  const auto status = ParseTree(j.dump()).status();
  EXPECT_EQ(status.code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(status.message(), HasSubstr("version"));
}

TEST(TreeSerializationTest, RejectsMalformedDocuments) {
  const Dataset data = RandomDataset(1, {.rows = 30});
  auto tree = DecisionTree::Train(data, {}, {});
  const auto good = nlohmann::json::parse(SerializeTree(*tree));
  EXPECT_FALSE(ParseTree("not json").ok());
  EXPECT_FALSE(ParseTree("{}").ok());
  auto j = good;
  j.erase("nodes");
  EXPECT_FALSE(ParseTree(j.dump()).ok());
  j = good;
  j["nodes"][0]["class_counts"] = "x";
  EXPECT_FALSE(ParseTree(j.dump()).ok());
  j = good;
  j["nodes"][0]["n_samples"] = 1e9;
  EXPECT_FALSE(ParseTree(j.dump()).ok());
  j = good;
  j["config"]["criterion"] = "twoing";
  EXPECT_FALSE(ParseTree(j.dump()).ok());
  j = good;
  j["kind"] = "adaboost";
  EXPECT_FALSE(ParseTree(j.dump()).ok());
}

TEST(ModelFileTest, SchemaMismatchIsExplicit) {
  const Dataset data = RandomDataset(2, {.rows = 40, .features = 3});
  const Dataset other = RandomDataset(2, {.rows = 40, .features = 4});
  auto tree = DecisionTree::Train(data, {}, {});
  ASSERT_TRUE(tree.ok());
  const std::string path =
      (std::filesystem::temp_directory_path() / "privtree_model_test.json")
          .string();
  ASSERT_TRUE(SaveModel(*tree, path).ok());
  auto loaded = LoadModel(path, data.schema());
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ((*loaded)->kind(), "decision_tree");
  const auto status = LoadModel(path, other.schema()).status();
  EXPECT_FALSE(status.ok());
  EXPECT_THAT(status.message(), HasSubstr("schema mismatch"));
  std::filesystem::remove(path);
  EXPECT_EQ(LoadModel(path).status().code(), absl::StatusCode::kNotFound);
}

TEST(EnsembleSerializationTest, ForestOfHundredTreesRoundTrips) {
  const Dataset data = RandomDataset(5, {.rows = 150, .features = 5});
  EnsembleConfig config = EnsembleConfig::ForestDefaults();
  config.seed = 3;
  config.base.growth_order = GrowthOrder::kBreadthFirst;
  auto forest = TrainForest(data, SomeSpec(), config);
  ASSERT_TRUE(forest.ok());
  ASSERT_EQ(forest->trees().size(), 100u);
  const std::string text = SerializeEnsemble(*forest);
  auto loaded = ParseEnsemble(text);
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(loaded->Importance().values, forest->Importance().values);
  EXPECT_EQ(*loaded->PredictAll(data), *forest->PredictAll(data));
  EXPECT_EQ(SerializeEnsemble(*loaded), text);
  EXPECT_EQ(loaded->config(), forest->config());
}

TEST(EnsembleSerializationTest, AdaBoostKeepsStageWeights) {
  const Dataset data = RandomDataset(6, {.rows = 120, .classes = 3});
  auto model = TrainAdaBoost(data, {}, EnsembleConfig::AdaBoostDefaults());
  ASSERT_TRUE(model.ok());
  auto parsed = ParseModel(SerializeEnsemble(*model), data.schema());
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  const auto* loaded = dynamic_cast<const EnsembleModel*>(parsed->get());
  ASSERT_NE(loaded, nullptr);
  EXPECT_EQ(loaded->kind(), "adaboost");
  EXPECT_EQ(loaded->tree_weights(), model->tree_weights());
  EXPECT_EQ(loaded->stage_errors(), model->stage_errors());
}

TEST(SensitivitySerializationTest, RoundTripAndDefaults) {
  const SensitivitySpec spec = SomeSpec();
  auto parsed = ParseSensitivity(SerializeSensitivity(spec));
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(*parsed, spec);
  auto partial = ParseSensitivity(R"({"a": {"split_budget": 3}})");
  ASSERT_TRUE(partial.ok());
  EXPECT_EQ(partial->features.at("a").weight, 0.0);
  EXPECT_EQ(partial->features.at("a").split_budget, 3);
  EXPECT_FALSE(ParseSensitivity(R"({"a": {"weight": 2}})").ok());
  EXPECT_FALSE(ParseSensitivity("[1]").ok());
}

}  // namespace
}  // namespace privtree
