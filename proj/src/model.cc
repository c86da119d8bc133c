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

#include "privtree/model.h"

#include <numeric>

#include "absl/strings/str_cat.h"
#include "privtree/status_macros.h"

namespace privtree {

ImportanceVector NormalizeImportance(std::vector<double> raw) {
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  ImportanceVector out;
  if (sum > 0.0) {
    for (double& v : raw) v /= sum;
    out.normalized = true;
  }
  out.values = std::move(raw);
  return out;
}

absl::Status CheckSchemaCompatible(const Schema& model, const Schema& data) {
  if (model.features.size() != data.features.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("model has ", model.features.size(),
                     " features, data has ", data.features.size()));
  }
  for (size_t f = 0; f < model.features.size(); ++f) {
    const FeatureMeta& a = model.features[f];
    const FeatureMeta& b = data.features[f];
    if (a.name != b.name || a.kind != b.kind || a.categories != b.categories) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature ", f, " differs: model \"", a.name,
                       "\", data \"", b.name, "\""));
    }
  }
  if (model.label.name != data.label.name ||
      model.label.categories != data.label.categories) {
    return absl::InvalidArgumentError("label column differs from the model");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<int>> Model::PredictAll(const Dataset& data) const {
  RETURN_IF_ERROR(CheckSchemaCompatible(schema(), data.schema()));
  std::vector<int> out;
  out.reserve(data.num_rows());
  for (size_t r = 0; r < data.num_rows(); ++r) {
    ASSIGN_OR_RETURN(const int y, Predict(data.row(r)));
    out.push_back(y);
  }
  return out;
}

absl::StatusOr<double> Model::Accuracy(const Dataset& data) const {
  ASSIGN_OR_RETURN(const std::vector<int> predicted, PredictAll(data));
  size_t correct = 0, labeled = 0;
  for (size_t r = 0; r < data.num_rows(); ++r) {
    if (data.label(r) == kMissingLabel) continue;
    ++labeled;
    if (predicted[r] == data.label(r)) ++correct;
  }
  if (labeled == 0) {
    return absl::InvalidArgumentError("no labeled rows to score");
  }
  return static_cast<double>(correct) / labeled;
}

}  // namespace privtree
