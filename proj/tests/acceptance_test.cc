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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
//
// The Nursery data is read from $PRIVTREE_NURSERY_DATA, falling back to
// data/nursery.data in the source tree.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "privtree/attack.h"
#include "privtree/dataset.h"
#include "privtree/experiment.h"
#include "privtree/recipes.h"
#include "privtree/tree.h"
#include "tests/testing/oracles.h"

namespace privtree {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(absl::StrCat(ok ? "" : "NOT ", what));
  }
  void Fail(const std::string& why) {
    pass = false;
    notes.push_back(why);
  }
};

// Every experiment run by the suite, re-executed for criterion 9.
struct RunRecord {
  ExperimentConfig config;
  const Dataset* data;
  bool attack;
  std::string csv;
};
std::vector<RunRecord>* runs = new std::vector<RunRecord>;

absl::StatusOr<std::string> RunToCsv(const ExperimentConfig& config,
                                     const Dataset& data, bool attack) {
  std::ostringstream out;
  if (attack) {
    auto result = RunAttackExperiment(config, data);
    if (!result.ok()) return result.status();
    WriteAttackCsv(config, *result, out);
  } else {
    auto result = RunSweep(config, data);
    if (!result.ok()) return result.status();
    WriteSweepCsv(config, *result, out);
  }
  return out.str();
}

absl::StatusOr<SweepResult> Sweep(const ExperimentConfig& config,
                                  const Dataset& data) {
  auto result = RunSweep(config, data);
  if (result.ok()) {
    std::ostringstream out;
    WriteSweepCsv(config, *result, out);
    runs->push_back({config, &data, false, out.str()});
  }
  return result;
}

absl::StatusOr<AttackResult> Attack(const ExperimentConfig& config,
                                    const Dataset& data) {
  auto result = RunAttackExperiment(config, data);
  if (result.ok()) {
    std::ostringstream out;
    WriteAttackCsv(config, *result, out);
    runs->push_back({config, &data, true, out.str()});
  }
  return result;
}

std::string Fmt(double v) { return absl::StrFormat("%.4f", v); }

std::string Series(const std::vector<double>& values) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(Fmt(v));
  return absl::StrCat("[", absl::StrJoin(parts, ", "), "]");
}

bool NonIncreasing(const std::vector<double>& v, double tol) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] + tol) return false;
  }
  return true;
}

bool NonDecreasing(const std::vector<double>& v, double tol) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - tol) return false;
  }
  return true;
}

double Range(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end()) -
         *std::min_element(v.begin(), v.end());
}

std::vector<uint64_t> FiveSeeds() { return {0, 1, 2, 3, 4}; }

// ---------------------------------------------------------------------------
// 1. Constraint audits and null-constraint equivalence.

testing::RandomDataOptions RandomOptions(std::mt19937_64& gen, uint64_t i) {
  testing::RandomDataOptions options;
  options.rows = std::uniform_int_distribution<int>(10, 150)(gen);
  options.features = std::uniform_int_distribution<int>(1, 6)(gen);
  options.max_cardinality = std::uniform_int_distribution<int>(2, 6)(gen);
  options.classes = std::uniform_int_distribution<int>(2, 4)(gen);
  options.numeric = i % 3 == 0;
  options.signal = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  return options;
}

std::pair<SensitivitySpec, TreeConfig> RandomSpec(const Dataset& data,
                                                  std::mt19937_64& gen) {
  SensitivitySpec spec;
  TreeConfig config;
  config.criterion =
      gen() % 2 ? SplitCriterion::kEntropy : SplitCriterion::kGini;
  config.growth_order =
      gen() % 2 ? GrowthOrder::kBreadthFirst : GrowthOrder::kDepthFirst;
  config.level_mode = gen() % 3 == 0 ? LevelMode::kNodeRank : LevelMode::kDepth;
  if (gen() % 3 == 0) config.max_depth = static_cast<int>(gen() % 6);
  config.min_samples_split = 2 + static_cast<int>(gen() % 4);
  for (const FeatureMeta& meta : data.features()) {
    if (gen() % 3 == 0) continue;
    FeatureSensitivity entry;
    if (gen() % 2) {
      entry.weight = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    }
    if (gen() % 2) entry.level_threshold = static_cast<int64_t>(gen() % 8);
    if (config.growth_order == GrowthOrder::kBreadthFirst && gen() % 2) {
      entry.split_budget = static_cast<int64_t>(gen() % 5);
    }
    spec.features[meta.name] = entry;
  }
  return {spec, config};
}

Outcome Criterion1() {
  Outcome out;
  std::mt19937_64 gen(1);
  int audited = 0, matched = 0;
  std::string first_error;
  for (uint64_t i = 0; i < 500; ++i) {
    const Dataset data = testing::RandomDataset(i, RandomOptions(gen, i));
    const auto [spec, config] = RandomSpec(data, gen);
    auto tree = DecisionTree::Train(data, spec, config);
    std::string error;
    if (!tree.ok()) {
      error = tree.status().ToString();
    } else if (auto s = tree->AuditConstraints(); !s.ok()) {
      error = s.ToString();
    } else {
      error = testing::AuditSplitOptimality(*tree, data);
    }
    if (error.empty()) {
      ++audited;
    } else if (first_error.empty()) {
      first_error = absl::StrCat("tree ", i, ": ", error);
    }
    // The same data with no constraints against the reference CART.
    TreeConfig plain;
    plain.criterion = config.criterion;
    plain.max_depth = config.max_depth;
    plain.min_samples_split = config.min_samples_split;
    auto null_tree = DecisionTree::Train(data, {}, plain);
    auto ref = testing::ReferenceCart(data, plain.criterion, plain.max_depth,
                                      plain.min_samples_split);
    if (null_tree.ok() &&
        testing::CompareWithReference(*null_tree, *ref).empty()) {
      ++matched;
    } else if (first_error.empty()) {
      first_error = absl::StrCat("null tree ", i, " differs from CART");
    }
  }
  out.Check(audited == 500, absl::StrCat(audited,
                                         "/500 constrained trees "
                                         "pass level/budget/weight audits"));
  out.Check(matched == 500,
            absl::StrCat(matched, "/500 null-constraint trees match CART"));
  if (!first_error.empty()) out.notes.push_back(first_error);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Incremental importance against post-hoc recomputation.

Outcome Criterion2() {
  Outcome out;
  std::mt19937_64 gen(2);
  double worst = 0.0, worst_sum = 0.0;
  int checked = 0;
  for (uint64_t i = 0; i < 200; ++i) {
    const Dataset data =
        testing::RandomDataset(1000 + i, RandomOptions(gen, i));
    const auto [spec, config] = RandomSpec(data, gen);
    auto tree = DecisionTree::Train(data, spec, config);
    if (!tree.ok()) {
      out.Fail(tree.status().ToString());
      return out;
    }
    const std::vector<double> oracle = testing::RecomputeImportance(*tree);
    const std::vector<double>& incremental = tree->training_importance();
    for (size_t f = 0; f < oracle.size(); ++f) {
      worst = std::max(worst, std::abs(oracle[f] - incremental[f]));
    }
    const ImportanceVector normalized = tree->Importance();
    if (normalized.normalized) {
      double sum = 0.0;
      for (double v : normalized.values) sum += v;
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    ++checked;
  }
  out.Check(worst <= 1e-12,
            absl::StrFormat("max |incremental - recomputed| = %.3g over %d "
                            "trees (<= 1e-12)",
                            worst, checked));
  out.Check(worst_sum <= 1e-9,
            absl::StrFormat("max |sum - 1| = %.3g (<= 1e-9)", worst_sum));
  return out;
}

// ---------------------------------------------------------------------------
// 3. White-box decisions against the all-leaves evaluation.

Outcome Criterion3() {
  Outcome out;
  std::mt19937_64 gen(3);
  int agree = 0, total = 0, max_depth_seen = 0;
  while (total < 1000) {
    const int features = std::uniform_int_distribution<int>(2, 6)(gen);
    const int classes = std::uniform_int_distribution<int>(2, 4)(gen);
    std::vector<int> cards = {2};
    for (int f = 1; f < features; ++f) {
      cards.push_back(std::uniform_int_distribution<int>(2, 5)(gen));
    }
    const int n = std::uniform_int_distribution<int>(15, 80)(gen);
    std::vector<std::vector<int>> rows(n);
    std::vector<int> labels(n);
    for (int r = 0; r < n; ++r) {
      for (int f = 0; f < features; ++f) rows[r].push_back(gen() % cards[f]);
      labels[r] = gen() % 3 == 0 ? static_cast<int>(gen() % classes)
                                 : (rows[r][0] + rows[r][1]) % classes;
    }
    const Dataset data = testing::MakeCategorical(rows, labels, cards, classes);
    TreeConfig config;
    config.max_depth = std::uniform_int_distribution<int>(1, 4)(gen);
    SensitivitySpec spec;
    if (gen() % 3 == 0) spec.features["f0"].weight = 0.3;
    auto tree = DecisionTree::Train(data, spec, config);
    if (!tree.ok()) {
      out.Fail(tree.status().ToString());
      return out;
    }
    max_depth_seen = std::max(max_depth_seen, tree->Depth());
    const double p1 = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
    const std::vector<double> prior = {1.0 - p1, p1};
    for (int i = 0; i < 20 && total < 1000; ++i, ++total) {
      std::vector<double> known = {kMissingValue};
      for (int f = 1; f < features; ++f) known.push_back(gen() % cards[f]);
      const int observed = static_cast<int>(gen() % classes);
      agree += WhiteBoxDecision(*tree, known, 0, observed, prior) ==
               testing::BruteForceWhiteBox(*tree, known, 0, observed, prior);
    }
  }
  out.Check(agree == 1000, absl::StrCat(agree,
                                        "/1000 decisions match the oracle (max "
                                        "depth ",
                                        max_depth_seen, ")"));
  return out;
}

// ---------------------------------------------------------------------------
// 4-6 and part of 8: Nursery.

std::string NurseryPath() {
  if (const char* env = std::getenv("PRIVTREE_NURSERY_DATA")) return env;
  return (std::filesystem::path(PRIVTREE_SOURCE_DIR) / "data" / "nursery.data")
      .string();
}

ExperimentConfig NurseryConfig(const std::string& name) {
  ExperimentConfig config;
  config.name = name;
  config.dataset.recipe = "nursery";
  config.dataset.path = NurseryPath();
  config.seeds = FiveSeeds();
  return config;
}

const std::vector<double> kBudgets = {30, 10, 5, 3, 2, 1};

Outcome Criterion4(const Dataset& nursery) {
  Outcome out;
  ExperimentConfig config = NurseryConfig("fig3_nursery_sweep");
  config.method = PrivacyMethod::kSplits;
  config.sensitive_features = {"social"};
  for (double b : kBudgets) config.grid.push_back(GridPoint{b, {}});
  auto result = Sweep(config, nursery);
  if (!result.ok()) {
    out.Fail(result.status().ToString());
    return out;
  }
  const size_t social = *nursery.FeatureIndex("social");
  std::vector<double> importance, accuracy;
  for (size_t p = 0; p <= kBudgets.size(); ++p) {
    importance.push_back(result->Mean(p)->importance[social]);
    accuracy.push_back(result->Mean(p)->model_accuracy);
  }
  out.Check(std::abs(accuracy[0] - 0.928) <= 0.02,
            absl::StrCat("baseline accuracy ", Fmt(accuracy[0]),
                         " within 0.928 +- 0.02"));
  out.Check(std::abs(importance[0] - 0.043) <= 0.02,
            absl::StrCat("baseline social importance ", Fmt(importance[0]),
                         " within 0.043 +- 0.02"));
  out.Check(NonIncreasing(importance, 0.0),
            absl::StrCat("importance non-increasing over budgets "
                         "none,30,10,5,3,2,1: ",
                         Series(importance)));
  out.Check(importance.back() <= 0.02,
            absl::StrCat("importance at budget 1 = ", Fmt(importance.back()),
                         " <= 0.02"));
  double worst = 0.0;
  for (double a : accuracy) worst = std::max(worst, std::abs(a - accuracy[0]));
  out.Check(worst <= 0.02,
            absl::StrCat("max accuracy change ", Fmt(worst), " <= 0.02"));
  return out;
}

std::vector<double> MeanSeries(const AttackResult& result, size_t points,
                               AttackKind kind, double AttackRow::* field) {
  std::vector<double> values;
  for (size_t p = 0; p < points; ++p) {
    const AttackRow* row = result.Mean(p, kind);
    values.push_back(row ? row->*field : std::nan(""));
  }
  return values;
}

Outcome Criterion5(const Dataset& nursery) {
  Outcome out;
  ExperimentConfig config = NurseryConfig("fig3_nursery_attack");
  config.method = PrivacyMethod::kSplits;
  config.sensitive_features = {"social"};
  for (double b : kBudgets) config.grid.push_back(GridPoint{b, {}});
  config.attacked_feature = "social";
  auto result = Attack(config, nursery);
  if (!result.ok()) {
    out.Fail(result.status().ToString());
    return out;
  }
  const size_t n = kBudgets.size() + 1;
  const auto acc = &AttackRow::attack_accuracy;
  const auto ideal = MeanSeries(*result, n, AttackKind::kIdeal, acc);
  const auto bb = MeanSeries(*result, n, AttackKind::kBlackBox, acc);
  const auto wb = MeanSeries(*result, n, AttackKind::kWhiteBox, acc);
  const auto imp =
      MeanSeries(*result, n, AttackKind::kWhiteBox, &AttackRow::importance);
  out.notes.push_back(absl::StrCat("wb ", Series(wb), " bb ", Series(bb),
                                   " ideal ", Series(ideal)));
  out.Check(wb[0] > bb[0] && bb[0] > ideal[0],
            "wb > bb > ideal at the unconstrained point");
  out.Check(wb[0] - ideal[0] >= 0.05,
            absl::StrCat("wb - ideal = ", Fmt(wb[0] - ideal[0]), " >= 0.05"));
  const size_t low = std::min_element(imp.begin(), imp.end()) - imp.begin();
  out.Check(bb[low] - ideal[low] <= 0.03,
            absl::StrCat("bb - ideal at lowest importance = ",
                         Fmt(bb[low] - ideal[low]), " <= 0.03"));
  out.Check(Range(ideal) < 0.03,
            absl::StrCat("ideal range ", Fmt(Range(ideal)), " < 0.03"));
  return out;
}

Outcome Criterion6(const Dataset& nursery) {
  Outcome out;
  ExperimentConfig config = NurseryConfig("fig4_nursery_control");
  config.method = PrivacyMethod::kSplits;
  config.sensitive_features = {"children", "health",  "has_nurs",
                               "parents",  "housing", "finance"};
  for (double b : {50, 30, 10, 5, 3}) config.grid.push_back(GridPoint{b, {}});
  config.attacked_feature = "social";
  auto result = Attack(config, nursery);
  if (!result.ok()) {
    out.Fail(result.status().ToString());
    return out;
  }
  const size_t n = 6;
  const auto model =
      MeanSeries(*result, n, AttackKind::kBlackBox, &AttackRow::model_accuracy);
  const auto acc = &AttackRow::attack_accuracy;
  const auto bb = MeanSeries(*result, n, AttackKind::kBlackBox, acc);
  const auto wb = MeanSeries(*result, n, AttackKind::kWhiteBox, acc);
  const double drop = model[0] - *std::min_element(model.begin(), model.end());
  out.Check(drop >= 0.06, absl::StrCat("model accuracy drop ", Fmt(drop),
                                       " >= 0.06 ", Series(model)));
  out.Check(Range(bb) < 0.05,
            absl::StrCat("bb range ", Fmt(Range(bb)), " < 0.05"));
  out.Check(Range(wb) < 0.05,
            absl::StrCat("wb range ", Fmt(Range(wb)), " < 0.05"));
  return out;
}

// ---------------------------------------------------------------------------
// 7. Synthetic extremes.

// s is boolean with P(s = 1) = 0.4; a, b, c have three values.
Dataset Extremes(bool label_is_s, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 600; ++i) {
    std::vector<int> row = {
        std::bernoulli_distribution(0.4)(gen), static_cast<int>(gen() % 3),
        static_cast<int>(gen() % 3), static_cast<int>(gen() % 3)};
    labels.push_back(label_is_s ? row[0] : (row[0] + row[1] + row[2]) % 2);
    rows.push_back(row);
  }
  return testing::MakeCategorical(rows, labels, {2, 3, 3, 3}, 2,
                                  {"s", "a", "b", "c"});
}

Outcome Criterion7(const Dataset& leak, const Dataset& mixed) {
  Outcome out;
  ExperimentConfig config;
  config.name = "extremes";
  config.dataset.recipe = "csv";
  config.sensitive_features = {"s"};
  config.attacked_feature = "s";
  config.seeds = FiveSeeds();

  // Label equal to the sensitive feature, unconstrained.
  config.grid = {GridPoint{}};
  config.include_baseline = false;
  auto leaked = Attack(config, leak);
  if (!leaked.ok()) {
    out.Fail(leaked.status().ToString());
    return out;
  }
  // Budget 0 on a label that depends on s.
  config.name = "extremes_budget0";
  config.grid = {GridPoint{0.0, {}}};
  auto hidden = Attack(config, mixed);
  if (!hidden.ok()) {
    out.Fail(hidden.status().ToString());
    return out;
  }
  double min_imp = 1.0, min_wb = 1.0, max_imp0 = 0.0;
  int exact = 0, total = 0;
  for (const AttackRow& row : leaked->rows) {
    if (!row.seed || row.kind != AttackKind::kWhiteBox) continue;
    min_imp = std::min(min_imp, row.importance);
    min_wb = std::min(min_wb, row.attack_accuracy);
  }
  for (const AttackRow& row : hidden->rows) {
    if (!row.seed || row.kind != AttackKind::kWhiteBox) continue;
    auto split = TrainTestSplit(mixed, {config.train_fraction, *row.seed});
    const std::vector<double> prior = *Prior(split->first, "s");
    max_imp0 = std::max(max_imp0, row.importance);
    exact += row.attack_accuracy == std::max(prior[0], prior[1]);
    ++total;
  }
  out.Check(min_imp == 1.0,
            absl::StrCat("label = s: importance ", Fmt(min_imp), " = 1"));
  out.Check(min_wb >= 0.99,
            absl::StrCat("label = s: wb accuracy ", Fmt(min_wb), " >= 0.99"));
  out.Check(max_imp0 == 0.0,
            absl::StrCat("budget 0: importance ", Fmt(max_imp0), " = 0"));
  out.Check(exact == total && total == 5,
            absl::StrCat("budget 0: wb = max(prior) exactly in ", exact, "/",
                         total, " seeds"));
  return out;
}

// ---------------------------------------------------------------------------
// 8. Importance-increase and weights modes.

// Attacked-feature importance and wb accuracy must rise together; the
// weights sweep must lower importance.
void CheckModes(Outcome& out, absl::string_view label,
                const AttackResult& increase, size_t increase_points,
                const SweepResult& weights, size_t weight_points,
                size_t attacked) {
  const auto imp = MeanSeries(increase, increase_points, AttackKind::kWhiteBox,
                              &AttackRow::importance);
  const auto wb = MeanSeries(increase, increase_points, AttackKind::kWhiteBox,
                             &AttackRow::attack_accuracy);
  out.Check(
      NonDecreasing(imp, 1e-9),
      absl::StrCat(label, " increase mode: importance rises ", Series(imp)));
  out.Check(NonDecreasing(wb, 0.0) && wb.back() > wb.front(),
            absl::StrCat(label, " increase mode: wb rises with importance ",
                         Series(wb)));
  std::vector<double> w_imp;
  for (size_t p = 0; p < weight_points; ++p) {
    w_imp.push_back(weights.Mean(p)->importance[attacked]);
  }
  out.Check(NonIncreasing(w_imp, 0.0) && w_imp.back() < w_imp.front(),
            absl::StrCat(label, " weights mode: importance falls in w ",
                         Series(w_imp)));
}

ExperimentConfig WeightsConfig(ExperimentConfig config,
                               const std::string& feature) {
  config.model.kind = TargetKind::kAdaBoost;
  config.method = PrivacyMethod::kWeights;
  config.sensitive_features = {feature};
  for (double w : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    config.grid.push_back(GridPoint{w, {}});
  }
  return config;
}

void RunModes(Outcome& out, absl::string_view label, const Dataset& data,
              const ExperimentConfig& base, const std::string& feature,
              const std::vector<std::string>& others,
              const std::vector<size_t>& counts) {
  ExperimentConfig increase = base;
  increase.name = absl::StrCat(base.name, "_increase");
  increase.method = PrivacyMethod::kSplits;
  increase.attacked_feature = feature;
  for (size_t k : counts) {
    increase.grid.push_back(GridPoint{
        0.0, std::vector<std::string>(others.begin(), others.begin() + k)});
  }
  auto attacked = Attack(increase, data);
  ExperimentConfig weights = WeightsConfig(base, feature);
  weights.name = absl::StrCat(base.name, "_weights");
  auto swept = Sweep(weights, data);
  if (!attacked.ok() || !swept.ok()) {
    out.Fail(absl::StrCat(
        label, ": ",
        (!attacked.ok() ? attacked.status() : swept.status()).ToString()));
    return;
  }
  CheckModes(out, label, *attacked, counts.size() + 1, *swept, 6,
             *data.FeatureIndex(feature));
}

Outcome Criterion8(const Dataset* nursery, const Dataset& gss_like) {
  Outcome out;
  ExperimentConfig base;
  base.name = "gsslike";
  base.dataset.recipe = "synthetic_gss";
  base.seeds = FiveSeeds();
  std::vector<std::string> others;
  for (int j = 17; j >= 1; --j) others.push_back(absl::StrFormat("f%02d", j));
  RunModes(out, "gss-like", gss_like, base, "happiness", others,
           {9, 11, 14, 15, 17});
  if (nursery == nullptr) {
    out.Fail(absl::StrCat("Nursery part not run: no data at ", NurseryPath()));
    return out;
  }
  RunModes(out, "nursery", *nursery, NurseryConfig("nursery_modes"), "social",
           {"form", "finance", "housing", "children", "parents", "has_nurs",
            "health"},
           {2, 4, 6, 7});
  return out;
}

// ---------------------------------------------------------------------------
// 9. Determinism.

Outcome Criterion9() {
  Outcome out;
  int identical = 0;
  for (const RunRecord& record : *runs) {
    ExperimentConfig config = record.config;
    config.threads = 1;
    auto again = RunToCsv(config, *record.data, record.attack);
    if (again.ok() && *again == record.csv) {
      ++identical;
    } else {
      out.notes.push_back(absl::StrCat(config.name, " changed on re-run"));
    }
  }
  out.Check(identical == static_cast<int>(runs->size()) && !runs->empty(),
            absl::StrCat(identical, "/", runs->size(),
                         " experiment CSVs identical on re-run"));
  return out;
}

int Main() {
  bool all_pass = true;
  auto report = [&](int id, const std::string& title, double limit_seconds,
                    const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome outcome = body();
    const double seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_seconds > 0) {
      outcome.Check(
          seconds < limit_seconds,
          absl::StrFormat("runtime %.1f s < %.0f s", seconds, limit_seconds));
    }
    all_pass = all_pass && outcome.pass;
    std::cout << absl::StrFormat("CRITERION %d %s: %s (%.1f s) -- %s\n", id,
                                 outcome.pass ? "PASS" : "FAIL", title, seconds,
                                 absl::StrJoin(outcome.notes, "; "))
              << std::flush;
  };

  report(1, "constraint audits", 60, Criterion1);
  report(2, "importance oracle", 0, Criterion2);
  report(3, "white-box oracle", 10, Criterion3);

  std::optional<Dataset> nursery;
  std::string nursery_error;
  if (auto loaded = LoadNursery(NurseryPath()); loaded.ok()) {
    nursery = *std::move(loaded);
  } else {
    nursery_error = loaded.status().ToString();
  }
  auto needs_nursery = [&](const std::function<Outcome(const Dataset&)>& f) {
    return [&, f]() {
      if (nursery) return f(*nursery);
      Outcome out;
      out.Fail(absl::StrCat("Nursery data unavailable: ", nursery_error));
      return out;
    };
  };
  report(4, "Nursery split-budget sweep", 300, needs_nursery(Criterion4));
  report(5, "Nursery attack ordering", 900, needs_nursery(Criterion5));
  report(6, "Nursery control experiment", 0, needs_nursery(Criterion6));

  const Dataset leak = Extremes(true, 71);
  const Dataset mixed = Extremes(false, 72);
  report(7, "synthetic extremes", 0, [&] { return Criterion7(leak, mixed); });

  GssLikeOptions gss_options;
  const Dataset gss_like = GenerateGssLike(gss_options);
  report(8, "GSS substitute modes", 0,
         [&] { return Criterion8(nursery ? &*nursery : nullptr, gss_like); });
  report(9, "determinism", 0, Criterion9);
  return all_pass ? 0 : 1;
}

}  // namespace
}  // namespace privtree

int main() { return privtree::Main(); }
