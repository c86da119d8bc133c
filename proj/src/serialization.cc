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

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

using Json = nlohmann::json;

constexpr char kFormat[] = "privtree-model";

template <typename T>
Json Optional(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

template <typename T>
std::optional<T> ReadOptional(const Json& j, const char* key) {
  const Json& value = j.at(key);
  if (value.is_null()) return std::nullopt;
  return value.get<T>();
}

// Unwraps a StatusOr inside code that reports errors by exception.
template <typename T>
T OrThrow(absl::StatusOr<T> value) {
  if (!value.ok())
    throw std::runtime_error(std::string(value.status().message()));
  return *std::move(value);
}

Json MetaToJson(const FeatureMeta& meta) {
  return {{"name", meta.name},
          {"kind", std::string(FeatureKindName(meta.kind))},
          {"categories", meta.categories}};
}

FeatureMeta MetaFromJson(const Json& j, int index) {
  FeatureMeta meta;
  meta.name = j.at("name").get<std::string>();
  meta.kind = OrThrow(ParseFeatureKind(j.at("kind").get<std::string>()));
  meta.categories = j.at("categories").get<std::vector<std::string>>();
  meta.index = index;
  return meta;
}

Json SchemaToJson(const Schema& schema) {
  Json features = Json::array();
  for (const FeatureMeta& meta : schema.features) {
    features.push_back(MetaToJson(meta));
  }
  return {{"features", features}, {"label", MetaToJson(schema.label)}};
}

Schema SchemaFromJson(const Json& j) {
  Schema schema;
  int index = 0;
  for (const Json& meta : j.at("features")) {
    schema.features.push_back(MetaFromJson(meta, index++));
  }
  schema.label = MetaFromJson(j.at("label"), index);
  const absl::Status status = schema.Validate();
  if (!status.ok()) throw std::runtime_error(std::string(status.message()));
  return schema;
}

Json SensitivityToJson(const SensitivitySpec& spec) {
  Json out = Json::object();
  for (const auto& [name, entry] : spec.features) {
    out[name] = {{"weight", entry.weight},
                 {"level_threshold", Optional(entry.level_threshold)},
                 {"split_budget", Optional(entry.split_budget)}};
  }
  return out;
}

SensitivitySpec SensitivityFromJson(const Json& j) {
  if (!j.is_object()) throw std::runtime_error("sensitivity must be an object");
  SensitivitySpec spec;
  for (const auto& [name, entry] : j.items()) {
    FeatureSensitivity value;
    value.weight = entry.value("weight", 0.0);
    if (entry.contains("level_threshold")) {
      value.level_threshold = ReadOptional<int64_t>(entry, "level_threshold");
    }
    if (entry.contains("split_budget")) {
      value.split_budget = ReadOptional<int64_t>(entry, "split_budget");
    }
    spec.features[name] = value;
  }
  const absl::Status status = spec.Validate();
  if (!status.ok()) throw std::runtime_error(std::string(status.message()));
  return spec;
}

Json TreeConfigToJson(const TreeConfig& config) {
  return {{"criterion", std::string(SplitCriterionName(config.criterion))},
          {"max_depth", Optional(config.max_depth)},
          {"min_samples_split", config.min_samples_split},
          {"growth_order", std::string(GrowthOrderName(config.growth_order))},
          {"level_mode", std::string(LevelModeName(config.level_mode))},
          {"feature_subsample", config.feature_subsample},
          {"seed", config.seed}};
}

TreeConfig TreeConfigFromJson(const Json& j) {
  TreeConfig config;
  config.criterion =
      OrThrow(ParseSplitCriterion(j.at("criterion").get<std::string>()));
  config.max_depth = ReadOptional<int>(j, "max_depth");
  config.min_samples_split = j.at("min_samples_split").get<int>();
  config.growth_order =
      OrThrow(ParseGrowthOrder(j.at("growth_order").get<std::string>()));
  config.level_mode =
      OrThrow(ParseLevelMode(j.at("level_mode").get<std::string>()));
  config.feature_subsample = j.at("feature_subsample").get<int>();
  config.seed = j.at("seed").get<uint64_t>();
  return config;
}

Json NodeToJson(const TreeNode& node) {
  return {{"kind", node.is_leaf() ? "leaf" : "internal"},
          {"feature", node.feature},
          {"threshold", node.threshold},
          {"n_samples", node.n_samples},
          {"impurity", node.impurity},
          {"class_counts", node.class_counts},
          {"left", node.left},
          {"right", node.right},
          {"depth", node.depth},
          {"prediction", node.prediction}};
}

TreeNode NodeFromJson(const Json& j) {
  TreeNode node;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "leaf" && kind != "internal") {
    throw std::runtime_error("unknown node kind \"" + kind + "\"");
  }
  node.kind = kind == "leaf" ? NodeKind::kLeaf : NodeKind::kInternal;
  node.feature = j.at("feature").get<int>();
  node.threshold = j.at("threshold").get<double>();
  node.n_samples = j.at("n_samples").get<double>();
  node.impurity = j.at("impurity").get<double>();
  node.class_counts = j.at("class_counts").get<std::vector<double>>();
  node.left = j.at("left").get<int>();
  node.right = j.at("right").get<int>();
  node.depth = j.at("depth").get<int>();
  node.prediction = j.at("prediction").get<int>();
  return node;
}

// Tree body shared by standalone trees and ensemble members.
Json TreeBody(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& node : tree.nodes()) nodes.push_back(NodeToJson(node));
  return {{"config", TreeConfigToJson(tree.config())},
          {"sensitivity", SensitivityToJson(tree.sensitivity())},
          {"nodes", nodes}};
}

DecisionTree TreeFromBody(const Json& j, const Schema& schema) {
  std::vector<TreeNode> nodes;
  for (const Json& node : j.at("nodes")) nodes.push_back(NodeFromJson(node));
  return OrThrow(DecisionTree::FromNodes(
      schema, TreeConfigFromJson(j.at("config")),
      SensitivityFromJson(j.at("sensitivity")), std::move(nodes)));
}

Json Header(absl::string_view kind) {
  return {{"format", kFormat},
          {"version", kModelFormatVersion},
          {"kind", std::string(kind)}};
}

Json EnsembleConfigToJson(const EnsembleConfig& config) {
  return {{"n_trees", config.n_trees},
          {"bootstrap", config.bootstrap},
          {"feature_subsample", Optional(config.feature_subsample)},
          {"base", TreeConfigToJson(config.base)},
          {"seed", config.seed}};
}

EnsembleConfig EnsembleConfigFromJson(const Json& j) {
  EnsembleConfig config;
  config.n_trees = j.at("n_trees").get<int>();
  config.bootstrap = j.at("bootstrap").get<bool>();
  config.feature_subsample = ReadOptional<int>(j, "feature_subsample");
  config.base = TreeConfigFromJson(j.at("base"));
  config.seed = j.at("seed").get<uint64_t>();
  return config;
}

absl::StatusOr<Json> ParseDocument(absl::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("model file is not a JSON object");
  }
  if (j.value("format", "") != kFormat) {
    return absl::InvalidArgumentError("not a privtree model document");
  }
  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != kModelFormatVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat("unsupported model format version ",
                     j.contains("version") ? j["version"].dump() : "(none)",
                     ", expected ", kModelFormatVersion));
  }
  return j;
}

template <typename T, typename F>
absl::StatusOr<T> Guard(F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed model document: ", e.what()));
  }
}

}  // namespace

std::string SerializeTree(const DecisionTree& tree) {
  Json j = Header(tree.kind());
  j.update(TreeBody(tree));
  j["schema"] = SchemaToJson(tree.schema());
  return j.dump(1) + "\n";
}

std::string SerializeEnsemble(const EnsembleModel& model) {
  Json j = Header(model.kind());
  j["schema"] = SchemaToJson(model.schema());
  j["config"] = EnsembleConfigToJson(model.config());
  j["sensitivity"] = SensitivityToJson(model.sensitivity());
  j["tree_weights"] = model.tree_weights();
  j["stage_errors"] = model.stage_errors();
  Json trees = Json::array();
  for (const DecisionTree& tree : model.trees())
    trees.push_back(TreeBody(tree));
  j["trees"] = std::move(trees);
  return j.dump(1) + "\n";
}

absl::StatusOr<std::string> SerializeModel(const Model& model) {
  if (const auto* tree = dynamic_cast<const DecisionTree*>(&model)) {
    return SerializeTree(*tree);
  }
  if (const auto* ensemble = dynamic_cast<const EnsembleModel*>(&model)) {
    return SerializeEnsemble(*ensemble);
  }
  return absl::UnimplementedError(
      absl::StrCat("cannot serialize model kind ", model.kind()));
}

absl::StatusOr<DecisionTree> ParseTree(absl::string_view text) {
  ASSIGN_OR_RETURN(const Json j, ParseDocument(text));
  if (j.value("kind", "") != "decision_tree") {
    return absl::InvalidArgumentError(
        absl::StrCat("expected a decision_tree, found ", j.value("kind", "?")));
  }
  return Guard<DecisionTree>(
      [&] { return TreeFromBody(j, SchemaFromJson(j.at("schema"))); });
}

absl::StatusOr<EnsembleModel> ParseEnsemble(absl::string_view text) {
  ASSIGN_OR_RETURN(const Json j, ParseDocument(text));
  ASSIGN_OR_RETURN(const EnsembleKind kind,
                   ParseEnsembleKind(j.value("kind", "")));
  return Guard<EnsembleModel>([&] {
    const Schema schema = SchemaFromJson(j.at("schema"));
    std::vector<DecisionTree> trees;
    for (const Json& body : j.at("trees")) {
      trees.push_back(TreeFromBody(body, schema));
    }
    EnsembleModel model = OrThrow(EnsembleModel::FromParts(
        kind, EnsembleConfigFromJson(j.at("config")),
        SensitivityFromJson(j.at("sensitivity")), std::move(trees),
        j.at("tree_weights").get<std::vector<double>>(),
        j.at("stage_errors").get<std::vector<double>>()));
    return model;
  });
}

absl::StatusOr<std::unique_ptr<Model>> ParseModel(
    absl::string_view text, const std::optional<Schema>& expected) {
  ASSIGN_OR_RETURN(const Json j, ParseDocument(text));
  std::unique_ptr<Model> model;
  if (j.value("kind", "") == "decision_tree") {
    ASSIGN_OR_RETURN(DecisionTree tree, ParseTree(text));
    model = std::make_unique<DecisionTree>(std::move(tree));
  } else {
    ASSIGN_OR_RETURN(EnsembleModel ensemble, ParseEnsemble(text));
    model = std::make_unique<EnsembleModel>(std::move(ensemble));
  }
  if (expected) {
    const absl::Status status =
        CheckSchemaCompatible(model->schema(), *expected);
    if (!status.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema mismatch: ", status.message()));
    }
  }
  return model;
}

absl::Status SaveModel(const Model& model, const std::string& path) {
  ASSIGN_OR_RETURN(const std::string text, SerializeModel(model));
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << text;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::unique_ptr<Model>> LoadModel(
    const std::string& path, const std::optional<Schema>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto model = ParseModel(buffer.str(), expected);
  if (!model.ok()) {
    return absl::Status(model.status().code(),
                        absl::StrCat(path, ": ", model.status().message()));
  }
  return model;
}

std::string SerializeSensitivity(const SensitivitySpec& spec) {
  return SensitivityToJson(spec).dump();
}

absl::StatusOr<SensitivitySpec> ParseSensitivity(absl::string_view text) {
  Json j = Json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError("invalid JSON");
  try {
    return SensitivityFromJson(j);
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad sensitivity spec: ", e.what()));
  }
}

}  // namespace privtree
