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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "privtree/random.h"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

// Lower bound on a stage error so that a perfect stage gets a large but
// finite weight.
constexpr double kMinStageError = 1e-10;

TreeConfig MemberConfig(const EnsembleConfig& config, size_t num_features,
                        uint64_t seed) {
  TreeConfig tree = config.base;
  tree.feature_subsample = config.ResolvedSubsample(num_features);
  tree.seed = seed;
  return tree;
}

absl::Status CheckSubsample(const EnsembleConfig& config, size_t d) {
  if (config.ResolvedSubsample(d) > static_cast<int>(d)) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature_subsample ", *config.feature_subsample,
                     " exceeds the ", d, " features"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view EnsembleKindName(EnsembleKind kind) {
  return kind == EnsembleKind::kRandomForest ? "random_forest" : "adaboost";
}

absl::StatusOr<EnsembleKind> ParseEnsembleKind(absl::string_view name) {
  if (name == "random_forest") return EnsembleKind::kRandomForest;
  if (name == "adaboost") return EnsembleKind::kAdaBoost;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown ensemble kind \"", name, "\""));
}

EnsembleConfig EnsembleConfig::ForestDefaults() { return EnsembleConfig{}; }

EnsembleConfig EnsembleConfig::AdaBoostDefaults() {
  EnsembleConfig config;
  config.n_trees = 50;
  config.bootstrap = false;
  config.feature_subsample = 0;
  config.base.max_depth = 3;
  return config;
}

absl::Status EnsembleConfig::Validate() const {
  if (n_trees < 1) return absl::InvalidArgumentError("n_trees must be >= 1");
  if (feature_subsample && *feature_subsample < 0) {
    return absl::InvalidArgumentError("feature_subsample must be >= 0");
  }
  return base.Validate();
}

int EnsembleConfig::ResolvedSubsample(size_t num_features) const {
  if (feature_subsample) return *feature_subsample;
  return static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(num_features))));
}

absl::StatusOr<EnsembleModel> EnsembleModel::FromParts(
    EnsembleKind kind, EnsembleConfig config, SensitivitySpec sensitivity,
    std::vector<DecisionTree> trees, std::vector<double> tree_weights,
    std::vector<double> stage_errors) {
  RETURN_IF_ERROR(config.Validate());
  if (trees.empty()) return absl::InvalidArgumentError("ensemble has no trees");
  if (trees.size() != tree_weights.size()) {
    return absl::InvalidArgumentError("one weight per tree is required");
  }
  bool any_positive = false;
  for (double w : tree_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError("tree weights must be finite and >= 0");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) {
    return absl::InvalidArgumentError("no tree has a positive weight");
  }
  for (const DecisionTree& tree : trees) {
    if (!(tree.schema() == trees.front().schema())) {
      return absl::InvalidArgumentError("member trees disagree on the schema");
    }
  }
  EnsembleModel model;
  model.kind_ = kind;
  model.config_ = std::move(config);
  model.sensitivity_ = std::move(sensitivity);
  model.trees_ = std::move(trees);
  model.tree_weights_ = std::move(tree_weights);
  model.stage_errors_ = std::move(stage_errors);
  return model;
}

absl::StatusOr<int> EnsembleModel::Predict(std::span<const double> row) const {
  if (row.size() != schema().features.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("row has ", row.size(), " values, schema has ",
                     schema().features.size(), " features"));
  }
  std::vector<double> votes(schema().label.categories.size(), 0.0);
  for (size_t t = 0; t < trees_.size(); ++t) {
    const DecisionTree& tree = trees_[t];
    votes[tree.nodes()[tree.LeafIndex(row)].prediction] += tree_weights_[t];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) -
                          votes.begin());
}

ImportanceVector EnsembleModel::Importance() const {
  std::vector<double> sum(schema().features.size(), 0.0);
  const double total =
      std::accumulate(tree_weights_.begin(), tree_weights_.end(), 0.0);
  for (size_t t = 0; t < trees_.size(); ++t) {
    const ImportanceVector tree = trees_[t].Importance();
    for (size_t f = 0; f < sum.size(); ++f) {
      sum[f] += tree_weights_[t] * tree[f] / total;
    }
  }
  return NormalizeImportance(std::move(sum));
}

absl::Status EnsembleModel::AuditConstraints() const {
  for (size_t t = 0; t < trees_.size(); ++t) {
    if (!(trees_[t].sensitivity() == sensitivity_)) {
      return absl::InternalError(
          absl::StrCat("tree ", t, " carries a different sensitivity spec"));
    }
    const absl::Status status = trees_[t].AuditConstraints();
    if (!status.ok()) {
      return absl::InternalError(
          absl::StrCat("tree ", t, ": ", status.message()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<EnsembleModel> TrainForest(const Dataset& data,
                                          const SensitivitySpec& sensitivity,
                                          const EnsembleConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckSubsample(config, data.num_features()));
  if (data.empty()) return absl::InvalidArgumentError("empty training data");
  EnsembleModel model;
  model.kind_ = EnsembleKind::kRandomForest;
  model.config_ = config;
  model.sensitivity_ = sensitivity;
  const size_t n = data.num_rows();
  std::vector<double> weights(n);
  for (int t = 0; t < config.n_trees; ++t) {
    const uint64_t tree_seed = DeriveSeed(config.seed, t);
    std::fill(weights.begin(), weights.end(), config.bootstrap ? 0.0 : 1.0);
    if (config.bootstrap) {
      Random rng(DeriveSeed(tree_seed, 0));
      for (size_t i = 0; i < n; ++i) weights[rng.UniformInt(n)] += 1.0;
    }
    ASSIGN_OR_RETURN(
        DecisionTree tree,
        DecisionTree::TrainWeighted(data, weights, sensitivity,
                                    MemberConfig(config, data.num_features(),
                                                 DeriveSeed(tree_seed, 1))));
    model.trees_.push_back(std::move(tree));
    model.tree_weights_.push_back(1.0);
  }
  return model;
}

absl::StatusOr<EnsembleModel> TrainAdaBoost(const Dataset& data,
                                            const SensitivitySpec& sensitivity,
                                            const EnsembleConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckSubsample(config, data.num_features()));
  if (data.empty()) return absl::InvalidArgumentError("empty training data");
  const int k = data.num_classes();
  if (k < 2) {
    return absl::InvalidArgumentError("boosting needs at least two classes");
  }
  const double chance = 1.0 - 1.0 / k;
  EnsembleModel model;
  model.kind_ = EnsembleKind::kAdaBoost;
  model.config_ = config;
  model.sensitivity_ = sensitivity;

  const size_t n = data.num_rows();
  // Kept summing to n so that node sample counts stay on the row scale.
  std::vector<double> weights(n, 1.0);
  std::vector<bool> wrong(n);
  for (int t = 0; t < config.n_trees; ++t) {
    ASSIGN_OR_RETURN(
        DecisionTree tree,
        DecisionTree::TrainWeighted(data, weights, sensitivity,
                                    MemberConfig(config, data.num_features(),
                                                 DeriveSeed(config.seed, t))));
    double error = 0.0;
    for (size_t r = 0; r < n; ++r) {
      const int leaf = tree.LeafIndex(data.row(r));
      wrong[r] = tree.nodes()[leaf].prediction != data.label(r);
      if (wrong[r]) error += weights[r];
    }
    error /= std::accumulate(weights.begin(), weights.end(), 0.0);
    if (error >= chance) {
      if (t == 0) {
        return absl::FailedPreconditionError(absl::StrFormat(
            "first boosting stage is no better than chance: weighted error "
            "%.6f >= %.6f with %d classes (tree has %d nodes)",
            error, chance, k, tree.nodes().size()));
      }
      break;
    }
    const double clamped = std::max(error, kMinStageError);
    const double alpha =
        std::log((1.0 - clamped) / clamped) + std::log(k - 1.0);
    model.trees_.push_back(std::move(tree));
    model.tree_weights_.push_back(alpha);
    model.stage_errors_.push_back(error);
    if (error <= 0.0) break;

    const double boost = std::exp(alpha);
    double total = 0.0;
    for (size_t r = 0; r < n; ++r) {
      if (wrong[r]) weights[r] *= boost;
      total += weights[r];
    }
    for (double& w : weights) w *= n / total;
  }
  return model;
}

}  // namespace privtree
