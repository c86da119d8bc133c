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

// Experiment orchestration: constraint sweeps and attack experiments over a
// parameter grid, emitted as CSV tables.
//
// Config files are JSON:
//
//   {
//     "name": "nursery_splits",
//     "dataset": {"recipe": "nursery", "path": "data/nursery.data"},
//     "model": {"kind": "decision_tree", "criterion": "entropy"},
//     "method": "splits",
//     "sensitive_features": ["social"],
//     "grid": [30, 10, 5, 3, 2, 1],
//     "attacked_feature": "social",
//     "seeds": [0, 1, 2, 3, 4],
//     "output_dir": "results"
//   }
//
// A grid entry is either a number (applied to `sensitive_features`) or an
// object {"parameter": p, "features": [...]} naming its own feature set;
// "parameter": null marks an unconstrained point.

#ifndef PRIVTREE_EXPERIMENT_H_
#define PRIVTREE_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/attack.h"
#include "privtree/dataset.h"
#include "privtree/ensemble.h"
#include "privtree/model.h"
#include "privtree/recipes.h"
#include "privtree/tree.h"

namespace privtree {

enum class TargetKind { kDecisionTree, kRandomForest, kAdaBoost };
absl::string_view TargetKindName(TargetKind kind);
absl::StatusOr<TargetKind> ParseTargetKind(absl::string_view name);

enum class PrivacyMethod { kWeights, kLevels, kSplits };
absl::string_view PrivacyMethodName(PrivacyMethod method);
absl::StatusOr<PrivacyMethod> ParsePrivacyMethod(absl::string_view name);

struct GridPoint {
  // Unset: no constraint.
  std::optional<double> parameter;
  // Empty: the config's sensitive_features.
  std::vector<std::string> features;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct ModelSettings {
  TargetKind kind = TargetKind::kDecisionTree;
  SplitCriterion criterion = SplitCriterion::kEntropy;
  // For ensembles this is the member tree depth.
  std::optional<int> max_depth;
  int min_samples_split = 2;
  LevelMode level_mode = LevelMode::kDepth;
  // Unset keeps the model kind's default.
  std::optional<int> feature_subsample;
  std::optional<int> n_trees;
  std::optional<bool> bootstrap;
};

struct ExperimentConfig {
  std::string name = "experiment";
  // Value of the "dataset" CSV column; defaults to the recipe name.
  std::string dataset_name;
  RecipeSpec dataset;
  double train_fraction = 0.8;
  ModelSettings model;
  PrivacyMethod method = PrivacyMethod::kSplits;
  std::vector<std::string> sensitive_features;
  std::vector<GridPoint> grid;
  // Prepends an unconstrained point to the grid.
  bool include_baseline = true;
  std::optional<std::string> attacked_feature;
  AttackOptions attack;
  std::vector<uint64_t> seeds = {0};
  std::string output_dir = ".";
  // Worker threads over seeds; 0 picks the hardware concurrency. Results do
  // not depend on it.
  int threads = 0;

  absl::Status Validate() const;
  // Grid with the baseline point applied.
  std::vector<GridPoint> Points() const;
  const std::vector<std::string>& FeaturesOf(const GridPoint& point) const;
  std::string DatasetLabel() const;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view json);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);
// Canonical JSON (sorted keys). Parsing it yields an equal config.
std::string ExperimentConfigToJson(const ExperimentConfig& config);
// FNV-1a 64 of the canonical JSON, excluding output_dir and threads, as 16
// hex digits.
std::string ConfigHash(const ExperimentConfig& config);

// Sensitivity spec for a grid point under the config's method.
absl::StatusOr<SensitivitySpec> MakeSensitivity(const ExperimentConfig& config,
                                                const GridPoint& point);

// Trains the configured model kind on `train`.
absl::StatusOr<std::unique_ptr<Model>> TrainTarget(
    const ExperimentConfig& config, const Dataset& train,
    const SensitivitySpec& sensitivity, uint64_t seed);

struct SweepRow {
  GridPoint point;
  // Position in ExperimentConfig::Points().
  size_t point_index = 0;
  // Unset on mean rows.
  std::optional<uint64_t> seed;
  // "ok" or the training error.
  std::string status = "ok";
  // Mean rows: number of seeds averaged.
  int runs = 1;
  double model_accuracy = 0.0;
  std::vector<double> importance;
  // Sum over the point's sensitive features of baseline minus constrained
  // importance, against the unconstrained model of the same seed.
  double importance_loss = 0.0;
};

struct SweepResult {
  std::string config_hash;
  std::string dataset;
  std::vector<std::string> feature_names;
  // Per-seed rows of each point followed by its mean row.
  std::vector<SweepRow> rows;

  // Mean row of grid point `index`; null if absent.
  const SweepRow* Mean(size_t index) const;
};

absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const Dataset& data);
void WriteSweepCsv(const ExperimentConfig& config, const SweepResult& result,
                   std::ostream& out);

struct AttackRow {
  GridPoint point;
  size_t point_index = 0;
  std::optional<uint64_t> seed;
  AttackKind kind = AttackKind::kIdeal;
  std::string status = "ok";
  int runs = 1;
  double importance = 0.0;
  double model_accuracy = 0.0;
  double attack_accuracy = 0.0;
};

struct AttackResult {
  std::string config_hash;
  std::string dataset;
  std::string feature;
  // Per-seed rows of each point followed by one mean row per attack kind.
  std::vector<AttackRow> rows;

  // Mean row for grid point `index` and `kind`; null if absent.
  const AttackRow* Mean(size_t index, AttackKind kind) const;
};

absl::StatusOr<AttackResult> RunAttackExperiment(const ExperimentConfig& config,
                                                 const Dataset& data);
void WriteAttackCsv(const ExperimentConfig& config, const AttackResult& result,
                    std::ostream& out);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace privtree

#endif  // PRIVTREE_EXPERIMENT_H_
