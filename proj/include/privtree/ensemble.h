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

// Random forests and SAMME AdaBoost over privacy-guided trees. The
// sensitivity spec is applied to every member tree on its own.

#ifndef PRIVTREE_ENSEMBLE_H_
#define PRIVTREE_ENSEMBLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/dataset.h"
#include "privtree/model.h"
#include "privtree/tree.h"

namespace privtree {

enum class EnsembleKind { kRandomForest, kAdaBoost };

absl::string_view EnsembleKindName(EnsembleKind kind);
absl::StatusOr<EnsembleKind> ParseEnsembleKind(absl::string_view name);

struct EnsembleConfig {
  int n_trees = 100;
  // Forest only: train each tree on a bootstrap resample.
  bool bootstrap = true;
  // Features drawn per node. Unset selects ceil(sqrt(d)); 0 uses all.
  std::optional<int> feature_subsample;
  // Base learner settings. Its seed and feature_subsample are replaced per
  // tree.
  TreeConfig base;
  uint64_t seed = 0;

  static EnsembleConfig ForestDefaults();
  // 50 rounds of depth-3 trees over all features.
  static EnsembleConfig AdaBoostDefaults();

  absl::Status Validate() const;
  // The per-node feature count for `num_features` features.
  int ResolvedSubsample(size_t num_features) const;

  friend bool operator==(const EnsembleConfig&,
                         const EnsembleConfig&) = default;
};

class EnsembleModel : public Model {
 public:
  // Rebuilds a model from stored parts.
  static absl::StatusOr<EnsembleModel> FromParts(
      EnsembleKind kind, EnsembleConfig config, SensitivitySpec sensitivity,
      std::vector<DecisionTree> trees, std::vector<double> tree_weights,
      std::vector<double> stage_errors = {});

  absl::string_view kind() const override { return EnsembleKindName(kind_); }
  const Schema& schema() const override { return trees_.front().schema(); }
  // Weighted vote; ties go to the lowest class id.
  absl::StatusOr<int> Predict(std::span<const double> row) const override;
  // Weighted mean of the normalized per-tree importances, renormalized.
  ImportanceVector Importance() const override;

  EnsembleKind ensemble_kind() const { return kind_; }
  const EnsembleConfig& config() const { return config_; }
  const SensitivitySpec& sensitivity() const { return sensitivity_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  const std::vector<double>& tree_weights() const { return tree_weights_; }
  // AdaBoost: weighted training error of each kept stage.
  const std::vector<double>& stage_errors() const { return stage_errors_; }

  absl::Status AuditConstraints() const;

 private:
  friend absl::StatusOr<EnsembleModel> TrainForest(const Dataset&,
                                                   const SensitivitySpec&,
                                                   const EnsembleConfig&);
  friend absl::StatusOr<EnsembleModel> TrainAdaBoost(const Dataset&,
                                                     const SensitivitySpec&,
                                                     const EnsembleConfig&);

  EnsembleKind kind_ = EnsembleKind::kRandomForest;
  EnsembleConfig config_;
  SensitivitySpec sensitivity_;
  std::vector<DecisionTree> trees_;
  std::vector<double> tree_weights_;
  std::vector<double> stage_errors_;
};

absl::StatusOr<EnsembleModel> TrainForest(const Dataset& data,
                                          const SensitivitySpec& sensitivity,
                                          const EnsembleConfig& config);

// SAMME: stage weight ln((1 - err) / err) + ln(K - 1). Boosting stops once
// a stage is no better than chance (err >= 1 - 1/K) or fits perfectly.
absl::StatusOr<EnsembleModel> TrainAdaBoost(const Dataset& data,
                                            const SensitivitySpec& sensitivity,
                                            const EnsembleConfig& config);

}  // namespace privtree

#endif  // PRIVTREE_ENSEMBLE_H_
