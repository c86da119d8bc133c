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

#ifndef PRIVTREE_MODEL_H_
#define PRIVTREE_MODEL_H_

#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/dataset.h"

namespace privtree {

// Per-feature importance. When `normalized` is set the entries sum to 1;
// an all-zero vector (nothing was split) is left unnormalized.
struct ImportanceVector {
  std::vector<double> values;
  bool normalized = false;

  double operator[](size_t i) const { return values[i]; }
  size_t size() const { return values.size(); }
};

// Scales `raw` to sum to 1 unless it is all zero.
ImportanceVector NormalizeImportance(std::vector<double> raw);

// Errors unless `data` has the feature and label layout of `model`.
absl::Status CheckSchemaCompatible(const Schema& model, const Schema& data);

// Common surface of trained classifiers.
class Model {
 public:
  virtual ~Model() = default;

  // "decision_tree", "random_forest" or "adaboost".
  virtual absl::string_view kind() const = 0;
  virtual const Schema& schema() const = 0;
  virtual absl::StatusOr<int> Predict(std::span<const double> row) const = 0;
  virtual ImportanceVector Importance() const = 0;

  absl::StatusOr<std::vector<int>> PredictAll(const Dataset& data) const;
  absl::StatusOr<double> Accuracy(const Dataset& data) const;
};

}  // namespace privtree

#endif  // PRIVTREE_MODEL_H_
