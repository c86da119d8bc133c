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

// privtree: command-line front end for the experiment harness.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "privtree/dataset_io.h"
#include "privtree/ensemble.h"
#include "privtree/experiment.h"
#include "privtree/recipes.h"
#include "privtree/serialization.h"
#include "privtree/status_macros.h"
#include "privtree/tree.h"

namespace {

using Json = nlohmann::json;
using privtree::ExperimentConfig;

// Flags shared by the experiment subcommands. Each one, when given,
// overrides the matching field of the config file.
struct ConfigFlags {
  std::string config_path;
  std::string name;
  std::string recipe;
  std::string data;
  std::string schema;
  std::string label;
  std::string dataset_name;
  std::string booleanize;
  std::string positive;
  std::string model;
  std::string criterion;
  std::string max_depth;
  std::string level_mode;
  std::string n_trees;
  std::string method;
  std::string sensitive;
  std::string grid;
  std::string attacked;
  std::string instances;
  std::string seeds;
  std::string output_dir;
  std::string train_fraction;
  std::string max_epochs;
  int threads = -1;
  bool no_baseline = false;
};

void AddConfigFlags(CLI::App* app, ConfigFlags& f) {
  app->add_option("-c,--config", f.config_path, "JSON experiment config");
  app->add_option("--name", f.name, "Experiment name (output file prefix)");
  app->add_option("--recipe", f.recipe,
                  "Dataset recipe: nursery, gss, csv, synthetic_gss");
  app->add_option("--data", f.data, "Input data file");
  app->add_option("--schema", f.schema, "Schema file for the csv recipe");
  app->add_option("--label", f.label, "Label column");
  app->add_option("--dataset-name", f.dataset_name, "Dataset column value");
  app->add_option("--booleanize", f.booleanize,
                  "Feature to booleanize (csv/gss recipes)");
  app->add_option("--positive", f.positive,
                  "Comma-separated categories mapped to 1");
  app->add_option("--model", f.model,
                  "decision_tree, random_forest or adaboost");
  app->add_option("--criterion", f.criterion, "entropy or gini");
  app->add_option("--max-depth", f.max_depth, "Tree depth limit or 'none'");
  app->add_option("--level-mode", f.level_mode, "depth or node_rank");
  app->add_option("--n-trees", f.n_trees, "Ensemble size");
  app->add_option("--method", f.method, "weights, levels or splits");
  app->add_option("--sensitive", f.sensitive,
                  "Comma-separated sensitive features");
  app->add_option("--grid", f.grid,
                  "Comma-separated parameters ('none' = unconstrained)");
  app->add_option("--attacked", f.attacked, "Attacked boolean feature");
  app->add_option("--instances", f.instances,
                  "Attack instances from the train or test split");
  app->add_option("--seeds", f.seeds, "Comma-separated seeds");
  app->add_option("-o,--output-dir", f.output_dir, "Output directory");
  app->add_option("--train-fraction", f.train_fraction, "Train split share");
  app->add_option("--max-epochs", f.max_epochs, "Attack network epochs");
  app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  app->add_flag("--no-baseline", f.no_baseline,
                "Do not prepend an unconstrained grid point");
}

std::vector<std::string> SplitList(const std::string& text) {
  return absl::StrSplit(text, ',', absl::SkipWhitespace());
}

absl::StatusOr<Json> ParseNumber(const std::string& text) {
  if (text == "none" || text == "null") return Json(nullptr);
  double value;
  if (!absl::SimpleAtod(text, &value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a number: '", text, "'"));
  }
  if (value == static_cast<double>(static_cast<int64_t>(value))) {
    return Json(static_cast<int64_t>(value));
  }
  return Json(value);
}

absl::StatusOr<ExperimentConfig> BuildConfig(const ConfigFlags& f,
                                             bool need_grid) {
  Json j = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in)
      return absl::NotFoundError(absl::StrCat("cannot open ", f.config_path));
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat(f.config_path, ": ", e.what()));
    }
  }
  auto set = [&](Json& object, const char* key, const std::string& value) {
    if (!value.empty()) object[key] = value;
  };
  auto number = [&](Json& object, const char* key,
                    const std::string& value) -> absl::Status {
    if (value.empty()) return absl::OkStatus();
    ASSIGN_OR_RETURN(object[key], ParseNumber(value));
    return absl::OkStatus();
  };
  set(j, "name", f.name);
  Json& dataset = j["dataset"];
  if (dataset.is_null()) dataset = Json::object();
  set(dataset, "recipe", f.recipe);
  set(dataset, "path", f.data);
  set(dataset, "schema", f.schema);
  set(dataset, "label", f.label);
  set(dataset, "name", f.dataset_name);
  set(dataset, "booleanize", f.booleanize);
  if (!f.positive.empty()) dataset["positive"] = SplitList(f.positive);
  Json& model = j["model"];
  if (model.is_null()) model = Json::object();
  set(model, "kind", f.model);
  set(model, "criterion", f.criterion);
  set(model, "level_mode", f.level_mode);
  RETURN_IF_ERROR(number(model, "max_depth", f.max_depth));
  RETURN_IF_ERROR(number(model, "n_trees", f.n_trees));
  set(j, "method", f.method);
  if (!f.sensitive.empty()) j["sensitive_features"] = SplitList(f.sensitive);
  if (!f.grid.empty()) {
    Json grid = Json::array();
    for (const std::string& item : SplitList(f.grid)) {
      ASSIGN_OR_RETURN(Json value, ParseNumber(item));
      grid.push_back(value);
    }
    j["grid"] = grid;
  }
  if (!need_grid && !j.contains("grid")) j["grid"] = Json::array({nullptr});
  set(j, "attacked_feature", f.attacked);
  if (!f.instances.empty() || !f.max_epochs.empty()) {
    Json& attack = j["attack"];
    if (attack.is_null()) attack = Json::object();
    set(attack, "instances", f.instances);
    RETURN_IF_ERROR(number(attack, "max_epochs", f.max_epochs));
  }
  if (!f.seeds.empty()) {
    Json seeds = Json::array();
    for (const std::string& item : SplitList(f.seeds)) {
      uint64_t seed;
      if (!absl::SimpleAtoi(item, &seed)) {
        return absl::InvalidArgumentError(
            absl::StrCat("bad seed '", item, "'"));
      }
      seeds.push_back(seed);
    }
    j["seeds"] = seeds;
  }
  set(j, "output_dir", f.output_dir);
  RETURN_IF_ERROR(number(j, "train_fraction", f.train_fraction));
  if (f.threads >= 0) j["threads"] = f.threads;
  if (f.no_baseline) j["include_baseline"] = false;
  return privtree::ParseExperimentConfig(j.dump());
}

absl::Status WriteFile(const std::string& path,
                       const std::function<void(std::ostream&)>& body) {
  const std::filesystem::path file(path);
  std::error_code ec;
  if (file.has_parent_path()) {
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  body(out);
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

std::string OutputPath(const ExperimentConfig& config,
                       absl::string_view suffix) {
  return (std::filesystem::path(config.output_dir) /
          absl::StrCat(config.name, suffix))
      .string();
}

void PrintImportance(const privtree::Model& model) {
  const privtree::ImportanceVector importance = model.Importance();
  for (size_t f = 0; f < importance.size(); ++f) {
    std::cout << absl::StrFormat(
        "%-24s %.6f\n", model.schema().features[f].name, importance[f]);
  }
}

std::string DescribeSplit(const privtree::Schema& schema,
                          const privtree::TreeNode& node) {
  const privtree::FeatureMeta& meta = schema.features[node.feature];
  if (!meta.is_categorical()) {
    return absl::StrFormat("%s <= %g", meta.name, node.threshold);
  }
  std::vector<std::string> left;
  for (size_t c = 0; c < meta.categories.size(); ++c) {
    if (static_cast<double>(c) <= node.threshold)
      left.push_back(meta.categories[c]);
  }
  return absl::StrCat(meta.name, " in {", absl::StrJoin(left, ", "), "}");
}

void PrintTree(const privtree::DecisionTree& tree, int node, int indent) {
  const privtree::TreeNode& n = tree.nodes()[node];
  const std::string pad(2 * indent, ' ');
  const std::string& label = tree.schema().label.categories[n.prediction];
  if (n.is_leaf()) {
    std::cout << pad << "-> " << label << " (n=" << n.n_samples << ")\n";
    return;
  }
  std::cout << pad << "[" << node << "] " << DescribeSplit(tree.schema(), n)
            << " (n=" << n.n_samples << ")\n";
  PrintTree(tree, n.left, indent + 1);
  PrintTree(tree, n.right, indent + 1);
}

absl::Status RunPrep(const ConfigFlags& f, const std::string& out_csv,
                     const std::string& out_schema) {
  privtree::RecipeSpec spec;
  spec.recipe = f.recipe.empty() ? "csv" : f.recipe;
  spec.path = f.data;
  spec.schema_path = f.schema;
  spec.label = f.label;
  spec.booleanize = f.booleanize;
  for (const std::string& c : SplitList(f.positive)) spec.positive.insert(c);
  ASSIGN_OR_RETURN(privtree::Dataset data, privtree::LoadRecipe(spec));
  std::cout << "rows " << data.num_rows() << ", features "
            << data.num_features() << ", classes " << data.num_classes()
            << "\n";
  if (!out_csv.empty()) RETURN_IF_ERROR(privtree::SaveCsv(data, out_csv));
  if (!out_schema.empty()) {
    RETURN_IF_ERROR(privtree::SaveSchema(data.schema(), out_schema));
  }
  return absl::OkStatus();
}

absl::Status RunTrain(const ConfigFlags& f, const std::string& model_out) {
  ASSIGN_OR_RETURN(ExperimentConfig config, BuildConfig(f, false));
  ASSIGN_OR_RETURN(privtree::Dataset data,
                   privtree::LoadRecipe(config.dataset));
  const uint64_t seed = config.seeds.front();
  ASSIGN_OR_RETURN(auto split, privtree::TrainTestSplit(
                                   data, {config.train_fraction, seed}));
  const privtree::GridPoint point = config.grid.front();
  ASSIGN_OR_RETURN(privtree::SensitivitySpec spec,
                   privtree::MakeSensitivity(config, point));
  ASSIGN_OR_RETURN(std::unique_ptr<privtree::Model> model,
                   privtree::TrainTarget(config, split.first, spec, seed));
  ASSIGN_OR_RETURN(double accuracy, model->Accuracy(split.second));
  std::cout << "test accuracy " << privtree::FormatDouble(accuracy) << "\n";
  PrintImportance(*model);
  if (!model_out.empty())
    RETURN_IF_ERROR(privtree::SaveModel(*model, model_out));
  return absl::OkStatus();
}

absl::Status RunShow(const std::string& path, bool importance_only) {
  ASSIGN_OR_RETURN(std::unique_ptr<privtree::Model> model,
                   privtree::LoadModel(path));
  if (importance_only) {
    PrintImportance(*model);
    return absl::OkStatus();
  }
  std::cout << "kind " << model->kind() << "\n";
  if (const auto* tree =
          dynamic_cast<const privtree::DecisionTree*>(model.get())) {
    std::cout << "nodes " << tree->nodes().size() << ", leaves "
              << tree->NumLeaves() << ", depth " << tree->Depth() << "\n"
              << "sensitivity "
              << privtree::SerializeSensitivity(tree->sensitivity()) << "\n";
    PrintTree(*tree, 0, 0);
  } else if (const auto* ensemble =
                 dynamic_cast<const privtree::EnsembleModel*>(model.get())) {
    std::cout << "trees " << ensemble->trees().size() << "\n"
              << "sensitivity "
              << privtree::SerializeSensitivity(ensemble->sensitivity())
              << "\n";
    for (size_t t = 0; t < ensemble->trees().size(); ++t) {
      const privtree::DecisionTree& tree = ensemble->trees()[t];
      std::cout << absl::StrFormat(
          "  tree %zu: weight %.6f, nodes %zu, depth %d\n", t,
          ensemble->tree_weights()[t], tree.nodes().size(), tree.Depth());
    }
  }
  std::cout << "importance\n";
  PrintImportance(*model);
  return absl::OkStatus();
}

absl::Status RunExperiment(const ConfigFlags& f, bool attack) {
  ASSIGN_OR_RETURN(ExperimentConfig config, BuildConfig(f, true));
  ASSIGN_OR_RETURN(privtree::Dataset data,
                   privtree::LoadRecipe(config.dataset));
  std::string path;
  if (attack) {
    ASSIGN_OR_RETURN(privtree::AttackResult result,
                     privtree::RunAttackExperiment(config, data));
    path = OutputPath(config, "_attack.csv");
    RETURN_IF_ERROR(WriteFile(path, [&](std::ostream& out) {
      privtree::WriteAttackCsv(config, result, out);
    }));
  } else {
    ASSIGN_OR_RETURN(privtree::SweepResult result,
                     privtree::RunSweep(config, data));
    path = OutputPath(config, "_sweep.csv");
    RETURN_IF_ERROR(WriteFile(path, [&](std::ostream& out) {
      privtree::WriteSweepCsv(config, result, out);
    }));
  }
  RETURN_IF_ERROR(
      WriteFile(OutputPath(config, "_config.json"), [&](std::ostream& out) {
        out << privtree::ExperimentConfigToJson(config);
      }));
  std::cout << "wrote " << path << " (config " << privtree::ConfigHash(config)
            << ")\n";
  return absl::OkStatus();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-guided decision trees and model-inversion attacks"};
  app.require_subcommand(1);

  ConfigFlags prep_flags;
  std::string prep_out, prep_schema_out;
  CLI::App* prep = app.add_subcommand("prep", "Apply a dataset recipe");
  prep->add_option("--recipe", prep_flags.recipe,
                   "nursery, gss, csv, synthetic_gss");
  prep->add_option("--data", prep_flags.data, "Input data file");
  prep->add_option("--schema", prep_flags.schema, "Schema file (csv recipe)");
  prep->add_option("--label", prep_flags.label, "Label column");
  prep->add_option("--booleanize", prep_flags.booleanize,
                   "Feature to booleanize");
  prep->add_option("--positive", prep_flags.positive, "Categories mapped to 1");
  prep->add_option("--out", prep_out, "Prepared CSV");
  prep->add_option("--schema-out", prep_schema_out,
                   "Schema of the prepared CSV");

  ConfigFlags train_flags;
  std::string model_out;
  CLI::App* train = app.add_subcommand(
      "train", "Train one model at the first grid point and first seed");
  AddConfigFlags(train, train_flags);
  train->add_option("--model-out", model_out, "Where to store the model JSON");

  std::string importance_model;
  CLI::App* importance = app.add_subcommand(
      "importance", "Print a stored model's feature importance");
  importance->add_option("model", importance_model, "Model JSON")->required();

  ConfigFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "Importance/accuracy sweep");
  AddConfigFlags(sweep, sweep_flags);

  ConfigFlags attack_flags;
  CLI::App* attack = app.add_subcommand("attack", "Attack experiment");
  AddConfigFlags(attack, attack_flags);

  std::string show_model;
  CLI::App* show = app.add_subcommand("show", "Pretty-print a stored model");
  show->add_option("model", show_model, "Model JSON")->required();

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (prep->parsed()) {
    status = RunPrep(prep_flags, prep_out, prep_schema_out);
  } else if (train->parsed()) {
    status = RunTrain(train_flags, model_out);
  } else if (importance->parsed()) {
    status = RunShow(importance_model, /*importance_only=*/true);
  } else if (sweep->parsed()) {
    status = RunExperiment(sweep_flags, /*attack=*/false);
  } else if (attack->parsed()) {
    status = RunExperiment(attack_flags, /*attack=*/true);
  } else if (show->parsed()) {
    status = RunShow(show_model, /*importance_only=*/false);
  }
  if (!status.ok()) {
    std::cerr << "privtree: " << status.message() << "\n";
    return 1;
  }
  return 0;
}
