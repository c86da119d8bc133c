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

// Tabular dataset model: ordinal-encoded categorical features, numeric
// features, and a categorical label column. Also holds the preprocessing
// steps used by the experiment recipes.

#ifndef PRIVTREE_DATASET_H_
#define PRIVTREE_DATASET_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace privtree {

enum class FeatureKind { kCategorical, kNumeric };

absl::string_view FeatureKindName(FeatureKind kind);
absl::StatusOr<FeatureKind> ParseFeatureKind(absl::string_view name);

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  // Category strings in code order (categorical only).
  std::vector<std::string> categories;
  // Column position within the schema.
  int index = 0;

  bool is_categorical() const { return kind == FeatureKind::kCategorical; }
  std::optional<int> Encode(absl::string_view category) const;
  const std::string& Decode(int code) const { return categories.at(code); }
  absl::Status Validate() const;

  friend bool operator==(const FeatureMeta&, const FeatureMeta&) = default;
};

// Column layout of a dataset: features in column order plus the label.
struct Schema {
  std::vector<FeatureMeta> features;
  FeatureMeta label;

  absl::Status Validate() const;
  std::optional<size_t> FeatureIndex(absl::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

inline constexpr int kMissingLabel = -1;
inline constexpr double kMissingValue =
    std::numeric_limits<double>::quiet_NaN();
inline bool IsMissing(double value) { return std::isnan(value); }

// Immutable row-major table. Feature cells hold ordinal codes (categorical)
// or raw values (numeric); NaN marks a missing cell. Labels are class codes
// of `label_meta()`, or kMissingLabel.
class Dataset {
 public:
  Dataset() = default;

  // Validates every invariant of the table. `row_ids` defaults to 0..n-1.
  static absl::StatusOr<Dataset> Create(Schema schema,
                                        std::vector<double> values,
                                        std::vector<int> labels,
                                        std::vector<int64_t> row_ids = {});

  size_t num_rows() const { return labels_.size(); }
  size_t num_features() const { return schema_.features.size(); }
  bool empty() const { return labels_.empty(); }

  const Schema& schema() const { return schema_; }
  const std::vector<FeatureMeta>& features() const { return schema_.features; }
  const FeatureMeta& feature(size_t index) const {
    return schema_.features[index];
  }
  const FeatureMeta& label_meta() const { return schema_.label; }
  int num_classes() const {
    return static_cast<int>(schema_.label.categories.size());
  }

  double value(size_t row, size_t feature) const {
    return values_[row * num_features() + feature];
  }
  std::span<const double> row(size_t row) const {
    return {values_.data() + row * num_features(), num_features()};
  }
  int label(size_t row) const { return labels_[row]; }
  const std::vector<int>& labels() const { return labels_; }
  // Position of each row in the originally loaded file.
  const std::vector<int64_t>& row_ids() const { return row_ids_; }

  std::optional<size_t> FeatureIndex(absl::string_view name) const {
    return schema_.FeatureIndex(name);
  }
  absl::StatusOr<size_t> RequireFeature(absl::string_view name) const;

  // Rows in the given order (duplicates allowed).
  Dataset Subset(std::span<const size_t> rows) const;

  // Error naming the first missing feature cell, if any.
  absl::Status CheckComplete() const;

 private:
  Schema schema_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<int64_t> row_ids_;
};

struct SplitSpec {
  double train_fraction = 0.8;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

// Drops unlabeled rows and rows whose class holds less than
// `min_class_fraction` of the labeled rows, then re-encodes the surviving
// classes densely (keeping their relative order).
absl::StatusOr<Dataset> FilterLabel(const Dataset& dataset,
                                    double min_class_fraction);

// Replaces a categorical feature by a 0/1 feature ("0", "1") that is 1 when
// the original category is in `positive_categories`. Rows missing the
// feature are dropped.
absl::StatusOr<Dataset> BooleanizeFeature(
    const Dataset& dataset, absl::string_view feature,
    const std::set<std::string>& positive_categories);

// Seeded shuffle followed by a train/test partition.
absl::StatusOr<std::pair<Dataset, Dataset>> TrainTestSplit(
    const Dataset& dataset, const SplitSpec& spec);

// Empirical frequency of every category of a categorical feature.
absl::StatusOr<std::vector<double>> Prior(const Dataset& dataset,
                                          absl::string_view feature);

}  // namespace privtree

#endif  // PRIVTREE_DATASET_H_
