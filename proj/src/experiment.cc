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

#include "privtree/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "privtree/random.h"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

using Json = nlohmann::json;

// Rejects keys outside `known` so that typos do not pass silently.
absl::Status CheckKeys(const Json& object, absl::string_view where,
                       std::initializer_list<absl::string_view> known) {
  if (!object.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, " must be a JSON object"));
  }
  for (const auto& [key, value] : object.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in ", where));
    }
  }
  return absl::OkStatus();
}

template <typename T>
void Read(const Json& object, const char* key, T& out) {
  if (object.contains(key)) object.at(key).get_to(out);
}

template <typename T>
void ReadOptional(const Json& object, const char* key, std::optional<T>& out) {
  if (!object.contains(key)) return;
  const Json& value = object.at(key);
  if (value.is_null()) {
    out.reset();
  } else {
    out = value.get<T>();
  }
}

template <typename T>
Json OptionalJson(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

absl::Status ParseDataset(const Json& j, ExperimentConfig& config) {
  RETURN_IF_ERROR(
      CheckKeys(j, "dataset",
                {"name", "recipe", "path", "schema", "label", "booleanize",
                 "positive", "min_class_fraction", "synthetic"}));
  RecipeSpec& spec = config.dataset;
  Read(j, "name", config.dataset_name);
  Read(j, "recipe", spec.recipe);
  Read(j, "path", spec.path);
  Read(j, "schema", spec.schema_path);
  Read(j, "label", spec.label);
  Read(j, "booleanize", spec.booleanize);
  Read(j, "positive", spec.positive);
  Read(j, "min_class_fraction", spec.min_class_fraction);
  if (j.contains("synthetic")) {
    const Json& s = j.at("synthetic");
    RETURN_IF_ERROR(
        CheckKeys(s, "dataset.synthetic", {"rows", "other_features", "seed"}));
    Read(s, "rows", spec.synthetic.rows);
    Read(s, "other_features", spec.synthetic.other_features);
    Read(s, "seed", spec.synthetic.seed);
  }
  return absl::OkStatus();
}

absl::Status ParseModel(const Json& j, ModelSettings& model) {
  RETURN_IF_ERROR(
      CheckKeys(j, "model",
                {"kind", "criterion", "max_depth", "min_samples_split",
                 "level_mode", "feature_subsample", "n_trees", "bootstrap"}));
  if (j.contains("kind")) {
    ASSIGN_OR_RETURN(model.kind,
                     ParseTargetKind(j.at("kind").get<std::string>()));
  }
  if (j.contains("criterion")) {
    ASSIGN_OR_RETURN(model.criterion,
                     ParseSplitCriterion(j.at("criterion").get<std::string>()));
  }
  if (j.contains("level_mode")) {
    ASSIGN_OR_RETURN(model.level_mode,
                     ParseLevelMode(j.at("level_mode").get<std::string>()));
  }
  ReadOptional(j, "max_depth", model.max_depth);
  Read(j, "min_samples_split", model.min_samples_split);
  ReadOptional(j, "feature_subsample", model.feature_subsample);
  ReadOptional(j, "n_trees", model.n_trees);
  ReadOptional(j, "bootstrap", model.bootstrap);
  return absl::OkStatus();
}

absl::Status ParseAttack(const Json& j, AttackOptions& attack) {
  RETURN_IF_ERROR(
      CheckKeys(j, "attack",
                {"instances", "hidden_units", "max_epochs", "batch_size",
                 "learning_rate", "l2", "patience", "tolerance"}));
  if (j.contains("instances")) {
    ASSIGN_OR_RETURN(attack.source,
                     ParseInstanceSource(j.at("instances").get<std::string>()));
  }
  Read(j, "hidden_units", attack.mlp.hidden_units);
  Read(j, "max_epochs", attack.mlp.max_epochs);
  Read(j, "batch_size", attack.mlp.batch_size);
  Read(j, "learning_rate", attack.mlp.learning_rate);
  Read(j, "l2", attack.mlp.l2);
  Read(j, "patience", attack.mlp.patience);
  Read(j, "tolerance", attack.mlp.tolerance);
  return absl::OkStatus();
}

absl::Status ParseGrid(const Json& j, std::vector<GridPoint>& grid) {
  if (!j.is_array()) {
    return absl::InvalidArgumentError("grid must be a JSON array");
  }
  grid.clear();
  for (const Json& entry : j) {
    GridPoint point;
    if (entry.is_number()) {
      point.parameter = entry.get<double>();
    } else if (entry.is_object()) {
      RETURN_IF_ERROR(
          CheckKeys(entry, "grid entry", {"parameter", "features"}));
      ReadOptional(entry, "parameter", point.parameter);
      Read(entry, "features", point.features);
    } else if (entry.is_null()) {
      // Unconstrained point.
    } else {
      return absl::InvalidArgumentError(
          "grid entries must be numbers, null or objects");
    }
    grid.push_back(std::move(point));
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseJson(const Json& j) {
  RETURN_IF_ERROR(CheckKeys(
      j, "config",
      {"name", "dataset", "train_fraction", "model", "method",
       "sensitive_features", "grid", "include_baseline", "attacked_feature",
       "attack", "seeds", "output_dir", "threads"}));
  ExperimentConfig config;
  Read(j, "name", config.name);
  if (j.contains("dataset"))
    RETURN_IF_ERROR(ParseDataset(j.at("dataset"), config));
  Read(j, "train_fraction", config.train_fraction);
  if (j.contains("model"))
    RETURN_IF_ERROR(ParseModel(j.at("model"), config.model));
  if (j.contains("method")) {
    ASSIGN_OR_RETURN(config.method,
                     ParsePrivacyMethod(j.at("method").get<std::string>()));
  }
  Read(j, "sensitive_features", config.sensitive_features);
  if (j.contains("grid")) RETURN_IF_ERROR(ParseGrid(j.at("grid"), config.grid));
  Read(j, "include_baseline", config.include_baseline);
  ReadOptional(j, "attacked_feature", config.attacked_feature);
  if (j.contains("attack"))
    RETURN_IF_ERROR(ParseAttack(j.at("attack"), config.attack));
  Read(j, "seeds", config.seeds);
  Read(j, "output_dir", config.output_dir);
  Read(j, "threads", config.threads);
  RETURN_IF_ERROR(config.Validate());
  return config;
}

Json ToJson(const ExperimentConfig& config, bool with_runtime) {
  Json j;
  j["name"] = config.name;
  const RecipeSpec& spec = config.dataset;
  j["dataset"] = {
      {"name", config.dataset_name},
      {"recipe", spec.recipe},
      {"path", spec.path},
      {"schema", spec.schema_path},
      {"label", spec.label},
      {"booleanize", spec.booleanize},
      {"positive", spec.positive},
      {"min_class_fraction", spec.min_class_fraction},
      {"synthetic",
       {{"rows", spec.synthetic.rows},
        {"other_features", spec.synthetic.other_features},
        {"seed", spec.synthetic.seed}}},
  };
  j["train_fraction"] = config.train_fraction;
  const ModelSettings& m = config.model;
  j["model"] = {
      {"kind", std::string(TargetKindName(m.kind))},
      {"criterion", std::string(SplitCriterionName(m.criterion))},
      {"max_depth", OptionalJson(m.max_depth)},
      {"min_samples_split", m.min_samples_split},
      {"level_mode", std::string(LevelModeName(m.level_mode))},
      {"feature_subsample", OptionalJson(m.feature_subsample)},
      {"n_trees", OptionalJson(m.n_trees)},
      {"bootstrap", OptionalJson(m.bootstrap)},
  };
  j["method"] = std::string(PrivacyMethodName(config.method));
  j["sensitive_features"] = config.sensitive_features;
  Json grid = Json::array();
  for (const GridPoint& point : config.grid) {
    grid.push_back({{"parameter", OptionalJson(point.parameter)},
                    {"features", point.features}});
  }
  j["grid"] = grid;
  j["include_baseline"] = config.include_baseline;
  j["attacked_feature"] = OptionalJson(config.attacked_feature);
  const MlpConfig& mlp = config.attack.mlp;
  j["attack"] = {
      {"instances", std::string(InstanceSourceName(config.attack.source))},
      {"hidden_units", mlp.hidden_units},
      {"max_epochs", mlp.max_epochs},
      {"batch_size", mlp.batch_size},
      {"learning_rate", mlp.learning_rate},
      {"l2", mlp.l2},
      {"patience", mlp.patience},
      {"tolerance", mlp.tolerance},
  };
  j["seeds"] = config.seeds;
  if (with_runtime) {
    j["output_dir"] = config.output_dir;
    j["threads"] = config.threads;
  }
  return j;
}

std::string CsvField(absl::string_view text) {
  if (text.find_first_of(",\"\r\n") == absl::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string ParameterCell(const GridPoint& point) {
  return point.parameter ? FormatDouble(*point.parameter) : "none";
}

std::string SeedCell(const std::optional<uint64_t>& seed) {
  return seed ? absl::StrCat(*seed) : "mean";
}

// Runs `job(i)` for i in [0, count) on up to `threads` workers.
template <typename F>
void ParallelFor(size_t count, int threads, F&& job) {
  size_t workers = threads > 0
                       ? static_cast<size_t>(threads)
                       : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

absl::Status CheckFeatures(const ExperimentConfig& config,
                           const Dataset& data) {
  for (const GridPoint& point : config.Points()) {
    for (const std::string& name : config.FeaturesOf(point)) {
      RETURN_IF_ERROR(data.RequireFeature(name).status());
    }
  }
  return absl::OkStatus();
}

bool Constrains(const GridPoint& point, const ExperimentConfig& config) {
  return point.parameter.has_value() && !config.FeaturesOf(point).empty();
}

}  // namespace

absl::string_view TargetKindName(TargetKind kind) {
  switch (kind) {
    case TargetKind::kDecisionTree:
      return "decision_tree";
    case TargetKind::kRandomForest:
      return "random_forest";
    case TargetKind::kAdaBoost:
      return "adaboost";
  }
  return "unknown";
}

absl::StatusOr<TargetKind> ParseTargetKind(absl::string_view name) {
  for (TargetKind kind : {TargetKind::kDecisionTree, TargetKind::kRandomForest,
                          TargetKind::kAdaBoost}) {
    if (name == TargetKindName(kind)) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown model kind '", name,
                   "' (expected decision_tree, random_forest or adaboost)"));
}

absl::string_view PrivacyMethodName(PrivacyMethod method) {
  switch (method) {
    case PrivacyMethod::kWeights:
      return "weights";
    case PrivacyMethod::kLevels:
      return "levels";
    case PrivacyMethod::kSplits:
      return "splits";
  }
  return "unknown";
}

absl::StatusOr<PrivacyMethod> ParsePrivacyMethod(absl::string_view name) {
  for (PrivacyMethod method : {PrivacyMethod::kWeights, PrivacyMethod::kLevels,
                               PrivacyMethod::kSplits}) {
    if (name == PrivacyMethodName(method)) return method;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown privacy method '", name,
                   "' (expected weights, levels or splits)"));
}

absl::Status ExperimentConfig::Validate() const {
  if (grid.empty()) {
    return absl::InvalidArgumentError("parameter grid is empty");
  }
  if (seeds.empty()) return absl::InvalidArgumentError("no seeds given");
  if (dataset.recipe.empty()) {
    return absl::InvalidArgumentError("dataset recipe is not set");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    return absl::InvalidArgumentError("train_fraction must lie in (0, 1)");
  }
  if (model.min_samples_split < 2) {
    return absl::InvalidArgumentError("min_samples_split must be >= 2");
  }
  if (model.max_depth && *model.max_depth < 0) {
    return absl::InvalidArgumentError("max_depth must be >= 0");
  }
  if (model.n_trees && *model.n_trees < 1) {
    return absl::InvalidArgumentError("n_trees must be >= 1");
  }
  if (threads < 0) return absl::InvalidArgumentError("threads must be >= 0");
  RETURN_IF_ERROR(attack.mlp.Validate());
  for (const GridPoint& point : grid) {
    if (point.parameter && !std::isfinite(*point.parameter)) {
      return absl::InvalidArgumentError("grid parameters must be finite");
    }
    if (point.parameter && FeaturesOf(point).empty()) {
      return absl::InvalidArgumentError(
          "grid point has a parameter but no sensitive features");
    }
  }
  if (attacked_feature && attacked_feature->empty()) {
    return absl::InvalidArgumentError("attacked_feature is empty");
  }
  return absl::OkStatus();
}

std::vector<GridPoint> ExperimentConfig::Points() const {
  std::vector<GridPoint> points;
  if (include_baseline) points.push_back(GridPoint{});
  points.insert(points.end(), grid.begin(), grid.end());
  return points;
}

const std::vector<std::string>& ExperimentConfig::FeaturesOf(
    const GridPoint& point) const {
  return point.features.empty() ? sensitive_features : point.features;
}

std::string ExperimentConfig::DatasetLabel() const {
  return dataset_name.empty() ? dataset.recipe : dataset_name;
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view json) {
  try {
    return ParseJson(Json::parse(json.begin(), json.end()));
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid experiment config: ", e.what()));
  }
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto config = ParseExperimentConfig(buffer.str());
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

std::string ExperimentConfigToJson(const ExperimentConfig& config) {
  return ToJson(config, /*with_runtime=*/true).dump(1) + "\n";
}

std::string ConfigHash(const ExperimentConfig& config) {
  const std::string text = ToJson(config, /*with_runtime=*/false).dump();
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", hash);
}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

absl::StatusOr<SensitivitySpec> MakeSensitivity(const ExperimentConfig& config,
                                                const GridPoint& point) {
  SensitivitySpec spec;
  if (!point.parameter) return spec;
  const double p = *point.parameter;
  const bool integral = config.method != PrivacyMethod::kWeights;
  if (integral && (p != std::floor(p) || p < 0 || p > 1e15)) {
    return absl::InvalidArgumentError(
        absl::StrCat(PrivacyMethodName(config.method),
                     " parameter must be a non-negative integer, got ", p));
  }
  for (const std::string& name : config.FeaturesOf(point)) {
    FeatureSensitivity& s = spec.features[name];
    switch (config.method) {
      case PrivacyMethod::kWeights:
        s.weight = p;
        break;
      case PrivacyMethod::kLevels:
        s.level_threshold = static_cast<int64_t>(p);
        break;
      case PrivacyMethod::kSplits:
        s.split_budget = static_cast<int64_t>(p);
        break;
    }
  }
  RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::StatusOr<std::unique_ptr<Model>> TrainTarget(
    const ExperimentConfig& config, const Dataset& train,
    const SensitivitySpec& sensitivity, uint64_t seed) {
  const ModelSettings& m = config.model;
  TreeConfig tree;
  tree.criterion = m.criterion;
  tree.max_depth = m.max_depth;
  tree.min_samples_split = m.min_samples_split;
  tree.level_mode = m.level_mode;
  // Budgets are spent, and node ranks counted, in breadth-first order.
  tree.growth_order = config.method == PrivacyMethod::kSplits ||
                              m.level_mode == LevelMode::kNodeRank
                          ? GrowthOrder::kBreadthFirst
                          : GrowthOrder::kDepthFirst;
  tree.seed = seed;
  switch (m.kind) {
    case TargetKind::kDecisionTree: {
      tree.feature_subsample = m.feature_subsample.value_or(0);
      ASSIGN_OR_RETURN(DecisionTree model,
                       DecisionTree::Train(train, sensitivity, tree));
      return std::make_unique<DecisionTree>(std::move(model));
    }
    case TargetKind::kRandomForest:
    case TargetKind::kAdaBoost: {
      const bool forest = m.kind == TargetKind::kRandomForest;
      EnsembleConfig ensemble = forest ? EnsembleConfig::ForestDefaults()
                                       : EnsembleConfig::AdaBoostDefaults();
      if (!m.max_depth) tree.max_depth = ensemble.base.max_depth;
      ensemble.base = tree;
      ensemble.seed = seed;
      if (m.n_trees) ensemble.n_trees = *m.n_trees;
      if (m.bootstrap) ensemble.bootstrap = *m.bootstrap;
      if (m.feature_subsample) ensemble.feature_subsample = m.feature_subsample;
      ASSIGN_OR_RETURN(EnsembleModel model,
                       forest ? TrainForest(train, sensitivity, ensemble)
                              : TrainAdaBoost(train, sensitivity, ensemble));
      return std::make_unique<EnsembleModel>(std::move(model));
    }
  }
  return absl::InternalError("unhandled model kind");
}

const SweepRow* SweepResult::Mean(size_t index) const {
  for (const SweepRow& row : rows) {
    if (!row.seed && row.point_index == index) return &row;
  }
  return nullptr;
}

absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const Dataset& data) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckFeatures(config, data));
  const std::vector<GridPoint> points = config.Points();
  const size_t d = data.num_features();

  // runs[s][p]
  std::vector<std::vector<SweepRow>> runs(config.seeds.size());
  std::vector<absl::Status> split_errors(config.seeds.size());
  ParallelFor(config.seeds.size(), config.threads, [&](size_t s) {
    const uint64_t seed = config.seeds[s];
    auto split = TrainTestSplit(data, {config.train_fraction, seed});
    if (!split.ok()) {
      split_errors[s] = split.status();
      return;
    }
    const auto& [train, test] = *split;
    auto evaluate = [&](const GridPoint& point, size_t index, SweepRow& row) {
      row.point = point;
      row.point_index = index;
      row.seed = seed;
      auto status = [&]() -> absl::Status {
        ASSIGN_OR_RETURN(SensitivitySpec spec, MakeSensitivity(config, point));
        ASSIGN_OR_RETURN(std::unique_ptr<Model> model,
                         TrainTarget(config, train, spec, seed));
        ASSIGN_OR_RETURN(row.model_accuracy, model->Accuracy(test));
        row.importance = model->Importance().values;
        return absl::OkStatus();
      }();
      if (!status.ok()) {
        row.status = status.ToString();
        row.importance.assign(d, 0.0);
      }
    };
    std::vector<SweepRow>& out = runs[s];
    out.resize(points.size());
    std::optional<SweepRow> baseline;
    for (size_t p = 0; p < points.size(); ++p) {
      evaluate(points[p], p, out[p]);
      if (!Constrains(points[p], config) && !baseline) baseline = out[p];
    }
    if (!baseline) {
      baseline.emplace();
      evaluate(GridPoint{}, points.size(), *baseline);
    }
    for (size_t p = 0; p < points.size(); ++p) {
      SweepRow& row = out[p];
      if (row.status != "ok" || baseline->status != "ok") continue;
      for (const std::string& name : config.FeaturesOf(points[p])) {
        const size_t f = *data.FeatureIndex(name);
        row.importance_loss += baseline->importance[f] - row.importance[f];
      }
    }
  });
  for (const absl::Status& status : split_errors) RETURN_IF_ERROR(status);

  SweepResult result;
  result.config_hash = ConfigHash(config);
  result.dataset = config.DatasetLabel();
  for (const FeatureMeta& meta : data.features()) {
    result.feature_names.push_back(meta.name);
  }
  for (size_t p = 0; p < points.size(); ++p) {
    SweepRow mean;
    mean.point = points[p];
    mean.point_index = p;
    mean.runs = 0;
    mean.importance.assign(d, 0.0);
    for (size_t s = 0; s < runs.size(); ++s) {
      const SweepRow& row = runs[s][p];
      result.rows.push_back(row);
      if (row.status != "ok") continue;
      ++mean.runs;
      mean.model_accuracy += row.model_accuracy;
      mean.importance_loss += row.importance_loss;
      for (size_t f = 0; f < d; ++f) mean.importance[f] += row.importance[f];
    }
    if (mean.runs == 0) {
      mean.status = "failed";
    } else {
      const double k = mean.runs;
      mean.model_accuracy /= k;
      mean.importance_loss /= k;
      for (double& v : mean.importance) v /= k;
    }
    result.rows.push_back(std::move(mean));
  }
  return result;
}

void WriteSweepCsv(const ExperimentConfig& config, const SweepResult& result,
                   std::ostream& out) {
  out << "config_hash,dataset,model,method,parameter,sensitive_features,seed,"
         "status,runs,model_accuracy,importance_loss";
  for (const std::string& name : result.feature_names) {
    out << "," << CsvField(absl::StrCat("importance_", name));
  }
  out << "\n";
  for (const SweepRow& row : result.rows) {
    out << result.config_hash << "," << CsvField(result.dataset) << ","
        << TargetKindName(config.model.kind) << ","
        << PrivacyMethodName(config.method) << "," << ParameterCell(row.point)
        << "," << CsvField(absl::StrJoin(config.FeaturesOf(row.point), ";"))
        << "," << SeedCell(row.seed) << "," << CsvField(row.status) << ","
        << row.runs << "," << FormatDouble(row.model_accuracy) << ","
        << FormatDouble(row.importance_loss);
    for (double v : row.importance) out << "," << FormatDouble(v);
    out << "\n";
  }
}

const AttackRow* AttackResult::Mean(size_t index, AttackKind kind) const {
  for (const AttackRow& row : rows) {
    if (!row.seed && row.point_index == index && row.kind == kind) return &row;
  }
  return nullptr;
}

absl::StatusOr<AttackResult> RunAttackExperiment(const ExperimentConfig& config,
                                                 const Dataset& data) {
  RETURN_IF_ERROR(config.Validate());
  if (!config.attacked_feature) {
    return absl::InvalidArgumentError(
        "attack experiment needs attacked_feature");
  }
  const std::string& feature = *config.attacked_feature;
  RETURN_IF_ERROR(RequireBooleanFeature(data, feature).status());
  RETURN_IF_ERROR(CheckFeatures(config, data));
  const size_t attacked = *data.FeatureIndex(feature);
  const std::vector<GridPoint> points = config.Points();

  std::vector<AttackKind> kinds = {AttackKind::kIdeal, AttackKind::kBlackBox};
  if (config.model.kind == TargetKind::kDecisionTree) {
    kinds.push_back(AttackKind::kWhiteBox);
  }

  // runs[s][p] holds one row per attack kind.
  std::vector<std::vector<std::vector<AttackRow>>> runs(config.seeds.size());
  std::vector<absl::Status> split_errors(config.seeds.size());
  ParallelFor(config.seeds.size(), config.threads, [&](size_t s) {
    const uint64_t seed = config.seeds[s];
    auto split = TrainTestSplit(data, {config.train_fraction, seed});
    if (!split.ok()) {
      split_errors[s] = split.status();
      return;
    }
    const auto& [train, test] = *split;
    AttackOptions options = config.attack;
    options.mlp.seed = DeriveSeed(seed, 0xa77ac);
    std::optional<AttackReport> ideal;
    runs[s].resize(points.size());
    for (size_t p = 0; p < points.size(); ++p) {
      std::vector<AttackRow>& rows = runs[s][p];
      for (AttackKind kind : kinds) {
        AttackRow row;
        row.point = points[p];
        row.point_index = p;
        row.seed = seed;
        row.kind = kind;
        rows.push_back(row);
      }
      auto status = [&]() -> absl::Status {
        ASSIGN_OR_RETURN(SensitivitySpec spec,
                         MakeSensitivity(config, points[p]));
        ASSIGN_OR_RETURN(std::unique_ptr<Model> model,
                         TrainTarget(config, train, spec, seed));
        ASSIGN_OR_RETURN(
            std::vector<AttackReport> reports,
            EvaluateAttacks(train, test, feature, *model, options, ideal));
        for (const AttackReport& report : reports) {
          if (report.kind == AttackKind::kIdeal && !ideal) ideal = report;
          for (AttackRow& row : rows) {
            if (row.kind != report.kind) continue;
            row.importance = report.importance;
            row.model_accuracy = report.model_accuracy;
            row.attack_accuracy = report.accuracy;
          }
        }
        return absl::OkStatus();
      }();
      if (!status.ok()) {
        for (AttackRow& row : rows) row.status = status.ToString();
      }
    }
  });
  for (const absl::Status& status : split_errors) RETURN_IF_ERROR(status);

  AttackResult result;
  result.config_hash = ConfigHash(config);
  result.dataset = config.DatasetLabel();
  result.feature = data.feature(attacked).name;
  for (size_t p = 0; p < points.size(); ++p) {
    for (size_t s = 0; s < runs.size(); ++s) {
      for (const AttackRow& row : runs[s][p]) result.rows.push_back(row);
    }
    for (size_t k = 0; k < kinds.size(); ++k) {
      AttackRow mean;
      mean.point = points[p];
      mean.point_index = p;
      mean.kind = kinds[k];
      mean.runs = 0;
      for (size_t s = 0; s < runs.size(); ++s) {
        const AttackRow& row = runs[s][p][k];
        if (row.status != "ok") continue;
        ++mean.runs;
        mean.importance += row.importance;
        mean.model_accuracy += row.model_accuracy;
        mean.attack_accuracy += row.attack_accuracy;
      }
      if (mean.runs == 0) {
        mean.status = "failed";
      } else {
        mean.importance /= mean.runs;
        mean.model_accuracy /= mean.runs;
        mean.attack_accuracy /= mean.runs;
      }
      result.rows.push_back(mean);
    }
  }
  return result;
}

void WriteAttackCsv(const ExperimentConfig& config, const AttackResult& result,
                    std::ostream& out) {
  out << "dataset,feature,method,parameter,sensitive_features,importance,"
         "model_accuracy,attack_kind,attack_accuracy,seed,config_hash,model,"
         "instances,status,runs\n";
  for (const AttackRow& row : result.rows) {
    out << CsvField(result.dataset) << "," << CsvField(result.feature) << ","
        << PrivacyMethodName(config.method) << "," << ParameterCell(row.point)
        << "," << CsvField(absl::StrJoin(config.FeaturesOf(row.point), ";"))
        << "," << FormatDouble(row.importance) << ","
        << FormatDouble(row.model_accuracy) << "," << AttackKindName(row.kind)
        << "," << FormatDouble(row.attack_accuracy) << "," << SeedCell(row.seed)
        << "," << result.config_hash << "," << TargetKindName(config.model.kind)
        << "," << InstanceSourceName(config.attack.source) << ","
        << CsvField(row.status) << "," << row.runs << "\n";
  }
}

}  // namespace privtree
