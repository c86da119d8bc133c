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

// Attribute-inference attacks on a boolean sensitive feature:
//  * ideal: a shallow net predicts the feature from the other features;
//  * black box: the same net also sees the target model's classification;
//  * white box: for single trees, compares the two leaves reached with the
//    feature set to 0 and 1, weighting each by its training share and the
//    feature's prior.

#ifndef PRIVTREE_ATTACK_H_
#define PRIVTREE_ATTACK_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/dataset.h"
#include "privtree/mlp.h"
#include "privtree/model.h"
#include "privtree/tree.h"

namespace privtree {

enum class AttackKind { kIdeal, kBlackBox, kWhiteBox };

absl::string_view AttackKindName(AttackKind kind);

struct AttackInstance {
  // The full row with the sensitive cell set to kMissingValue.
  std::vector<double> known;
  // Target model's classification of the unmasked row.
  int observed_label = 0;
  // Hidden value, used only for scoring.
  int true_value = 0;
};

struct AttackReport {
  AttackKind kind = AttackKind::kIdeal;
  double accuracy = 0.0;
  size_t num_instances = 0;
  // Context filled in by EvaluateAttacks.
  double model_accuracy = 0.0;
  double importance = 0.0;
  std::vector<double> prior;
};

// Index of `feature` if it is a categorical feature with exactly two
// categories (codes 0 and 1).
absl::StatusOr<size_t> RequireBooleanFeature(const Dataset& data,
                                             absl::string_view feature);

absl::StatusOr<std::vector<AttackInstance>> MakeAttackInstances(
    const Dataset& rows, absl::string_view feature, const Model& target);

absl::StatusOr<AttackReport> IdealAttack(
    const Dataset& attack_train, absl::string_view feature,
    std::span<const AttackInstance> instances, const MlpConfig& config);

absl::StatusOr<AttackReport> BlackBoxAttack(
    const Dataset& attack_train, absl::string_view feature,
    std::span<const AttackInstance> instances, const Model& target,
    const MlpConfig& config);

// The white-box decision for one masked row. If exactly one of the two
// candidate values reproduces `observed_label`, that value wins; otherwise
// the value maximizing n_leaf(v) / N * prior[v] (ties: larger prior, then 0).
int WhiteBoxDecision(const DecisionTree& tree, std::span<const double> known,
                     size_t sensitive, int observed_label,
                     std::span<const double> prior);

absl::StatusOr<AttackReport> WhiteBoxAttack(
    std::span<const AttackInstance> instances, size_t sensitive,
    const DecisionTree& tree, const std::vector<double>& prior);

enum class InstanceSource { kTrain, kTest };

absl::string_view InstanceSourceName(InstanceSource source);
absl::StatusOr<InstanceSource> ParseInstanceSource(absl::string_view name);

struct AttackOptions {
  MlpConfig mlp;
  // Rows whose sensitive value is attacked. The attacker always learns from
  // the training split.
  InstanceSource source = InstanceSource::kTrain;
  bool run_ideal = true;
};

// Runs the ideal and black-box attacks, plus the white-box attack when the
// target is a single tree. `cached_ideal` replaces a fresh ideal attack (its
// result does not depend on the target). Model accuracy is measured on
// `test`; importance is that of `feature` in the target.
absl::StatusOr<std::vector<AttackReport>> EvaluateAttacks(
    const Dataset& train, const Dataset& test, absl::string_view feature,
    const Model& target, const AttackOptions& options,
    const std::optional<AttackReport>& cached_ideal = std::nullopt);

}  // namespace privtree

#endif  // PRIVTREE_ATTACK_H_
