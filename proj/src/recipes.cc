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

#include "privtree/recipes.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privtree/dataset_io.h"
#include "privtree/random.h"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

FeatureMeta Categorical(std::string name, std::vector<std::string> cats) {
  FeatureMeta meta;
  meta.name = std::move(name);
  meta.kind = FeatureKind::kCategorical;
  meta.categories = std::move(cats);
  return meta;
}

// Category orders as listed in the UCI attribute description.
Schema NurserySchema() {
  Schema schema;
  schema.features = {
      Categorical("parents", {"usual", "pretentious", "great_pret"}),
      Categorical("has_nurs", {"proper", "less_proper", "improper", "critical",
                               "very_crit"}),
      Categorical("form", {"complete", "completed", "incomplete", "foster"}),
      Categorical("children", {"1", "2", "3", "more"}),
      Categorical("housing", {"convenient", "less_conv", "critical"}),
      Categorical("finance", {"convenient", "inconv"}),
      Categorical("social", {"nonprob", "slightly_prob", "problematic"}),
      Categorical("health", {"recommended", "priority", "not_recom"}),
  };
  for (size_t i = 0; i < schema.features.size(); ++i) {
    schema.features[i].index = static_cast<int>(i);
  }
  schema.label = Categorical("class", {"not_recom", "recommend", "very_recom",
                                       "priority", "spec_prior"});
  schema.label.index = static_cast<int>(schema.features.size());
  return schema;
}

absl::StatusOr<bool> FirstFieldIs(const std::string& path,
                                  absl::string_view expected) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  CsvReader reader(in);
  std::vector<std::string> fields;
  ASSIGN_OR_RETURN(bool any, reader.Next(fields));
  return any && !fields.empty() && fields[0] == expected;
}

}  // namespace

const std::vector<std::string>& NurseryColumns() {
  static const auto* columns = new std::vector<std::string>{
      "parents", "has_nurs", "form",   "children", "housing",
      "finance", "social",   "health", "class"};
  return *columns;
}

absl::StatusOr<Dataset> LoadNursery(const std::string& path) {
  CsvOptions options;
  options.schema_hint = NurserySchema();
  options.label_column = "class";
  ASSIGN_OR_RETURN(options.has_header, FirstFieldIs(path, "parents"));
  if (!options.has_header) options.column_names = NurseryColumns();
  ASSIGN_OR_RETURN(Dataset raw, LoadCsv(path, options));
  ASSIGN_OR_RETURN(Dataset filtered, FilterLabel(raw, 0.001));
  return BooleanizeFeature(filtered, "social", {"problematic"});
}

absl::StatusOr<Dataset> LoadGss(const std::string& path,
                                const GssRecipe& recipe) {
  CsvOptions options;
  options.label_column = recipe.label;
  options.nullable_features = {recipe.attacked_feature};
  ASSIGN_OR_RETURN(Dataset raw, LoadCsv(path, options));
  if (!raw.FeatureIndex(recipe.attacked_feature)) {
    return absl::InvalidArgumentError(
        absl::StrCat("GSS file has no column '", recipe.attacked_feature, "'"));
  }
  ASSIGN_OR_RETURN(Dataset filtered,
                   FilterLabel(raw, recipe.min_class_fraction));
  return BooleanizeFeature(filtered, recipe.attacked_feature, recipe.positive);
}

Dataset GenerateGssLike(const GssLikeOptions& options) {
  const int others = std::clamp(options.other_features, 0, 17);
  Schema schema;
  schema.features.push_back(Categorical("happiness", {"0", "1"}));
  std::vector<int> cards;
  for (int j = 1; j <= others; ++j) {
    const int card = 3 + (j * 5) % 4;  // 4, 5, 6, 3, ...
    std::vector<std::string> cats;
    for (int c = 0; c < card; ++c) cats.push_back(absl::StrCat(c));
    schema.features.push_back(
        Categorical(absl::StrCat(j < 10 ? "f0" : "f", j), std::move(cats)));
    cards.push_back(card);
  }
  for (size_t i = 0; i < schema.features.size(); ++i) {
    schema.features[i].index = static_cast<int>(i);
  }
  schema.label = Categorical("marital_happiness",
                             {"not_too_happy", "pretty_happy", "very_happy"});
  schema.label.index = static_cast<int>(schema.features.size());

  const size_t width = schema.features.size();
  Random rng(DeriveSeed(options.seed, 0x6755));
  // Covariates come from a pool of repeated respondent profiles, so that
  // identical profiles carry different happiness values and labels.
  const int pool = std::max(20, options.rows / 8);
  std::vector<std::vector<int>> profiles(pool, std::vector<int>(others));
  std::vector<double> effect(pool, 0.0);
  for (int p = 0; p < pool; ++p) {
    double coef = 1.2;
    for (int j = 0; j < others; ++j) {
      const int code = static_cast<int>(rng.UniformInt(cards[j]));
      profiles[p][j] = code;
      // Non-monotone effect so that several thresholds are useful.
      const double x = static_cast<double>(code) / (cards[j] - 1);
      effect[p] += coef * ((j % 2 == 0) ? x - 0.5 : std::abs(x - 0.5) - 0.25);
      coef *= 0.8;
    }
  }
  std::vector<double> values;
  std::vector<int> labels;
  values.reserve(options.rows * width);
  labels.reserve(options.rows);
  for (int r = 0; r < options.rows; ++r) {
    const int p = static_cast<int>(rng.UniformInt(pool));
    const std::vector<int>& codes = profiles[p];
    // Happiness leans slightly on the first covariate only.
    const double p_happy = others > 0 && codes[0] >= 2 ? 0.46 : 0.34;
    const int happy = rng.Bernoulli(p_happy) ? 1 : 0;
    const double z = 2.0 * happy + effect[p] + rng.Normal();
    values.push_back(happy);
    for (int j = 0; j < others; ++j) values.push_back(codes[j]);
    labels.push_back(z < 0.0 ? 0 : (z < 1.2 ? 1 : 2));
  }
  auto dataset =
      Dataset::Create(std::move(schema), std::move(values), std::move(labels));
  return *std::move(dataset);
}

absl::StatusOr<Dataset> LoadRecipe(const RecipeSpec& spec) {
  if (spec.recipe == "synthetic_gss") return GenerateGssLike(spec.synthetic);
  if (spec.path.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("recipe '", spec.recipe, "' needs a data path"));
  }
  if (spec.recipe == "nursery") return LoadNursery(spec.path);
  if (spec.recipe == "gss") {
    GssRecipe recipe;
    if (!spec.label.empty()) recipe.label = spec.label;
    if (!spec.booleanize.empty()) recipe.attacked_feature = spec.booleanize;
    if (!spec.positive.empty()) recipe.positive = spec.positive;
    if (spec.min_class_fraction > 0) {
      recipe.min_class_fraction = spec.min_class_fraction;
    }
    return LoadGss(spec.path, recipe);
  }
  if (spec.recipe == "csv") {
    CsvOptions options;
    options.label_column = spec.label;
    if (!spec.schema_path.empty()) {
      ASSIGN_OR_RETURN(options.schema_hint, LoadSchema(spec.schema_path));
    }
    ASSIGN_OR_RETURN(Dataset data, LoadCsv(spec.path, options));
    ASSIGN_OR_RETURN(data, FilterLabel(data, spec.min_class_fraction));
    if (spec.booleanize.empty()) return data;
    return BooleanizeFeature(data, spec.booleanize, spec.positive);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown recipe '", spec.recipe,
                   "' (expected nursery, gss, csv or synthetic_gss)"));
}

}  // namespace privtree
