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

// Preprocessing recipes for the evaluation datasets.

#ifndef PRIVTREE_RECIPES_H_
#define PRIVTREE_RECIPES_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/dataset.h"

namespace privtree {

// Column names of the UCI nursery.data file, label last.
const std::vector<std::string>& NurseryColumns();

// Reads nursery.data (with or without a header row), drops the two-row
// "recommend" class and booleanizes `social` (1 = "problematic"). Yields
// 12,958 rows on the published file.
absl::StatusOr<Dataset> LoadNursery(const std::string& path);

struct GssRecipe {
  std::string label = "hapmar";
  std::string attacked_feature = "happiness";
  std::set<std::string> positive = {"Very happy"};
  double min_class_fraction = 0.01;
};

// Best-effort reconstruction for a GSS extract with a header row. The
// published subset's column list is unknown, so every non-label column is
// used as a feature and cells outside the missing tokens are taken as
// categories. Missing cells are allowed only in the attacked feature.
absl::StatusOr<Dataset> LoadGss(const std::string& path,
                                const GssRecipe& recipe = {});

struct GssLikeOptions {
  int rows = 5000;
  // Other features besides "happiness"; at most 17.
  int other_features = 17;
  uint64_t seed = 0;
};

// Synthetic stand-in with the shape of the GSS experiments: a boolean
// "happiness" feature with prior about [0.6, 0.4] that drives a noisy
// three-class label, plus categorical covariates of decreasing relevance
// ("f01" most relevant) that are only weakly related to happiness.
Dataset GenerateGssLike(const GssLikeOptions& options);

// Dispatches on a recipe name: "nursery", "gss", "csv" (a CSV file with a
// header, label last unless `label` is given) or "synthetic_gss" (path
// ignored).
struct RecipeSpec {
  std::string recipe;
  std::string path;
  std::string schema_path;
  std::string label;
  // For "csv": optional booleanization of one feature.
  std::string booleanize;
  std::set<std::string> positive;
  double min_class_fraction = 0.0;
  GssLikeOptions synthetic;
};

absl::StatusOr<Dataset> LoadRecipe(const RecipeSpec& spec);

}  // namespace privtree

#endif  // PRIVTREE_RECIPES_H_
