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

// JSON persistence for trees and ensembles.
//
// Every document carries {"format": "privtree-model", "version": 1,
// "kind": ...}. A tree document also holds "schema", "criterion",
// "config", "sensitivity" and "nodes"; each node is
//   {"kind", "feature", "threshold", "n_samples", "impurity",
//    "class_counts", "left", "right", "depth", "prediction"}
// with feature/left/right set to -1 on leaves. An ensemble document holds
// "schema", "config", "sensitivity", "tree_weights", "stage_errors" and
// "trees", the trees without their own schema. Keys are emitted in sorted
// order, so serializing a loaded model reproduces the input byte for byte.

#ifndef PRIVTREE_SERIALIZATION_H_
#define PRIVTREE_SERIALIZATION_H_

#include <memory>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/dataset.h"
#include "privtree/ensemble.h"
#include "privtree/model.h"
#include "privtree/tree.h"

namespace privtree {

inline constexpr int kModelFormatVersion = 1;

std::string SerializeTree(const DecisionTree& tree);
std::string SerializeEnsemble(const EnsembleModel& model);
// Dispatches on the dynamic type.
absl::StatusOr<std::string> SerializeModel(const Model& model);

absl::StatusOr<DecisionTree> ParseTree(absl::string_view text);
absl::StatusOr<EnsembleModel> ParseEnsemble(absl::string_view text);
// Any model kind. With `expected` set, a model trained on a different
// schema is rejected.
absl::StatusOr<std::unique_ptr<Model>> ParseModel(
    absl::string_view text, const std::optional<Schema>& expected = {});

absl::Status SaveModel(const Model& model, const std::string& path);
absl::StatusOr<std::unique_ptr<Model>> LoadModel(
    const std::string& path, const std::optional<Schema>& expected = {});

// Sensitivity spec as a JSON object keyed by feature name, e.g.
//   {"social": {"weight": 0.5, "level_threshold": 2, "split_budget": null}}
std::string SerializeSensitivity(const SensitivitySpec& spec);
absl::StatusOr<SensitivitySpec> ParseSensitivity(absl::string_view text);

}  // namespace privtree

#endif  // PRIVTREE_SERIALIZATION_H_
