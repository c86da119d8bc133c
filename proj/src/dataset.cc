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

#include "privtree/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privtree/random.h"
#include "privtree/status_macros.h"

namespace privtree {

absl::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kCategorical ? "categorical" : "numeric";
}

absl::StatusOr<FeatureKind> ParseFeatureKind(absl::string_view name) {
  if (name == "categorical") return FeatureKind::kCategorical;
  if (name == "numeric") return FeatureKind::kNumeric;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown feature kind \"", name, "\""));
}

std::optional<int> FeatureMeta::Encode(absl::string_view category) const {
  const auto it = std::find(categories.begin(), categories.end(), category);
  if (it == categories.end()) return std::nullopt;
  return static_cast<int>(it - categories.begin());
}

absl::Status FeatureMeta::Validate() const {
  if (name.empty()) return absl::InvalidArgumentError("empty feature name");
  if (kind == FeatureKind::kNumeric) {
    if (!categories.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("numeric feature \"", name, "\" has categories"));
    }
    return absl::OkStatus();
  }
  if (categories.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("categorical feature \"", name, "\" has no categories"));
  }
  std::vector<std::string> sorted = categories;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature \"", name, "\" has duplicate categories"));
  }
  return absl::OkStatus();
}

absl::Status Schema::Validate() const {
  std::vector<std::string> names;
  for (size_t i = 0; i < features.size(); ++i) {
    RETURN_IF_ERROR(features[i].Validate());
    if (features[i].index != static_cast<int>(i)) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature \"", features[i].name, "\" has index ",
                       features[i].index, ", expected ", i));
    }
    names.push_back(features[i].name);
  }
  RETURN_IF_ERROR(label.Validate());
  if (!label.is_categorical()) {
    return absl::InvalidArgumentError("label must be categorical");
  }
  names.push_back(label.name);
  std::sort(names.begin(), names.end());
  if (auto it = std::adjacent_find(names.begin(), names.end());
      it != names.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("duplicate column name \"", *it, "\""));
  }
  return absl::OkStatus();
}

std::optional<size_t> Schema::FeatureIndex(absl::string_view name) const {
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return i;
  }
  return std::nullopt;
}

absl::StatusOr<Dataset> Dataset::Create(Schema schema,
                                        std::vector<double> values,
                                        std::vector<int> labels,
                                        std::vector<int64_t> row_ids) {
  RETURN_IF_ERROR(schema.Validate());
  const size_t n = labels.size();
  const size_t d = schema.features.size();
  if (values.size() != n * d) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", n * d, " cells, got ", values.size()));
  }
  if (row_ids.empty()) {
    row_ids.resize(n);
    std::iota(row_ids.begin(), row_ids.end(), 0);
  } else if (row_ids.size() != n) {
    return absl::InvalidArgumentError("row id count differs from row count");
  }
  const int num_classes = static_cast<int>(schema.label.categories.size());
  for (size_t r = 0; r < n; ++r) {
    if (labels[r] != kMissingLabel &&
        (labels[r] < 0 || labels[r] >= num_classes)) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, ": label code ", labels[r], " out of range"));
    }
    for (size_t f = 0; f < d; ++f) {
      const FeatureMeta& meta = schema.features[f];
      const double v = values[r * d + f];
      if (IsMissing(v) || !meta.is_categorical()) continue;
      if (v < 0 || v >= static_cast<double>(meta.categories.size()) ||
          v != std::floor(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", r, ": invalid code ", v, " for feature \"",
                         meta.name, "\""));
      }
    }
  }
  Dataset ds;
  ds.schema_ = std::move(schema);
  ds.values_ = std::move(values);
  ds.labels_ = std::move(labels);
  ds.row_ids_ = std::move(row_ids);
  return ds;
}

absl::StatusOr<size_t> Dataset::RequireFeature(absl::string_view name) const {
  if (auto index = FeatureIndex(name)) return *index;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown feature \"", name, "\""));
}

Dataset Dataset::Subset(std::span<const size_t> rows) const {
  Dataset out;
  out.schema_ = schema_;
  const size_t d = num_features();
  out.values_.reserve(rows.size() * d);
  out.labels_.reserve(rows.size());
  out.row_ids_.reserve(rows.size());
  for (size_t r : rows) {
    const auto cells = row(r);
    out.values_.insert(out.values_.end(), cells.begin(), cells.end());
    out.labels_.push_back(labels_[r]);
    out.row_ids_.push_back(row_ids_[r]);
  }
  return out;
}

absl::Status Dataset::CheckComplete() const {
  for (size_t r = 0; r < num_rows(); ++r) {
    for (size_t f = 0; f < num_features(); ++f) {
      if (IsMissing(value(r, f))) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", row_ids_[r], ": missing value for feature \"",
                         feature(f).name, "\""));
      }
    }
  }
  return absl::OkStatus();
}

absl::Status SplitSpec::Validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "train_fraction must lie in (0, 1), got ", train_fraction));
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> FilterLabel(const Dataset& dataset,
                                    double min_class_fraction) {
  if (!(min_class_fraction >= 0.0 && min_class_fraction < 1.0)) {
    return absl::InvalidArgumentError("min_class_fraction must lie in [0, 1)");
  }
  const int k = dataset.num_classes();
  std::vector<size_t> counts(k, 0);
  size_t labeled = 0;
  for (int label : dataset.labels()) {
    if (label == kMissingLabel) continue;
    ++counts[label];
    ++labeled;
  }
  // Old code -> new code, -1 for dropped classes.
  std::vector<int> remap(k, -1);
  Schema schema = dataset.schema();
  schema.label.categories.clear();
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    const double fraction =
        static_cast<double>(counts[c]) / static_cast<double>(labeled);
    if (fraction < min_class_fraction) continue;
    remap[c] = static_cast<int>(schema.label.categories.size());
    schema.label.categories.push_back(dataset.label_meta().categories[c]);
  }
  std::vector<size_t> keep;
  for (size_t r = 0; r < dataset.num_rows(); ++r) {
    const int label = dataset.label(r);
    if (label != kMissingLabel && remap[label] >= 0) keep.push_back(r);
  }
  if (keep.empty()) {
    return absl::FailedPreconditionError("label filtering removed every row");
  }
  const Dataset kept = dataset.Subset(keep);
  std::vector<double> values;
  values.reserve(kept.num_rows() * kept.num_features());
  std::vector<int> labels;
  labels.reserve(kept.num_rows());
  for (size_t r = 0; r < kept.num_rows(); ++r) {
    const auto cells = kept.row(r);
    values.insert(values.end(), cells.begin(), cells.end());
    labels.push_back(remap[kept.label(r)]);
  }
  return Dataset::Create(std::move(schema), std::move(values),
                         std::move(labels), kept.row_ids());
}

absl::StatusOr<Dataset> BooleanizeFeature(
    const Dataset& dataset, absl::string_view feature,
    const std::set<std::string>& positive_categories) {
  ASSIGN_OR_RETURN(const size_t index, dataset.RequireFeature(feature));
  const FeatureMeta& meta = dataset.feature(index);
  if (!meta.is_categorical()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature \"", feature, "\" is not categorical"));
  }
  std::vector<bool> positive_code(meta.categories.size(), false);
  for (const std::string& category : positive_categories) {
    const auto code = meta.Encode(category);
    if (!code) {
      return absl::InvalidArgumentError(absl::StrCat(
          "feature \"", feature, "\" has no category \"", category, "\""));
    }
    positive_code[*code] = true;
  }
  Schema schema = dataset.schema();
  schema.features[index].categories = {"0", "1"};
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<int64_t> row_ids;
  for (size_t r = 0; r < dataset.num_rows(); ++r) {
    const double v = dataset.value(r, index);
    if (IsMissing(v)) continue;
    const auto cells = dataset.row(r);
    values.insert(values.end(), cells.begin(), cells.end());
    values[values.size() - cells.size() + index] =
        positive_code[static_cast<size_t>(v)] ? 1.0 : 0.0;
    labels.push_back(dataset.label(r));
    row_ids.push_back(dataset.row_ids()[r]);
  }
  if (labels.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("every row is missing feature \"", feature, "\""));
  }
  return Dataset::Create(std::move(schema), std::move(values),
                         std::move(labels), std::move(row_ids));
}

absl::StatusOr<std::pair<Dataset, Dataset>> TrainTestSplit(
    const Dataset& dataset, const SplitSpec& spec) {
  RETURN_IF_ERROR(spec.Validate());
  const size_t n = dataset.num_rows();
  const auto n_train = static_cast<size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    return absl::FailedPreconditionError(
        absl::StrCat("split of ", n, " rows at fraction ", spec.train_fraction,
                     " leaves a partition empty"));
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Random rng(spec.seed);
  rng.Shuffle(std::span<size_t>(order));
  const std::span<const size_t> all(order);
  return std::make_pair(dataset.Subset(all.first(n_train)),
                        dataset.Subset(all.subspan(n_train)));
}

absl::StatusOr<std::vector<double>> Prior(const Dataset& dataset,
                                          absl::string_view feature) {
  ASSIGN_OR_RETURN(const size_t index, dataset.RequireFeature(feature));
  const FeatureMeta& meta = dataset.feature(index);
  if (!meta.is_categorical()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "prior requires a categorical feature, \"", feature, "\" is numeric"));
  }
  std::vector<double> counts(meta.categories.size(), 0.0);
  double total = 0.0;
  for (size_t r = 0; r < dataset.num_rows(); ++r) {
    const double v = dataset.value(r, index);
    if (IsMissing(v)) continue;
    counts[static_cast<size_t>(v)] += 1.0;
    total += 1.0;
  }
  if (total == 0.0) {
    return absl::FailedPreconditionError(
        absl::StrCat("no observed values for \"", feature, "\""));
  }
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace privtree
