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

#include "privtree/attack.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

// Maps rows to network inputs: one-hot codes for categorical features,
// z-scores for numeric ones, and optionally a one-hot model output.
class InputEncoder {
 public:
  InputEncoder(const Dataset& fit, size_t sensitive, int output_classes)
      : sensitive_(sensitive), output_classes_(output_classes) {
    const size_t d = fit.num_features();
    for (size_t f = 0; f < d; ++f) {
      if (f == sensitive) continue;
      Column column{f, fit.feature(f).is_categorical(), 0.0, 1.0, width_};
      if (column.categorical) {
        width_ += fit.feature(f).categories.size();
      } else {
        double sum = 0.0, sq = 0.0;
        for (size_t r = 0; r < fit.num_rows(); ++r) sum += fit.value(r, f);
        column.mean = sum / fit.num_rows();
        for (size_t r = 0; r < fit.num_rows(); ++r) {
          const double z = fit.value(r, f) - column.mean;
          sq += z * z;
        }
        const double sd = std::sqrt(sq / fit.num_rows());
        column.scale = sd > 0.0 ? sd : 1.0;
        ++width_;
      }
      columns_.push_back(column);
    }
    output_offset_ = width_;
    width_ += output_classes;
  }

  size_t width() const { return width_; }

  void Append(std::span<const double> row, int model_output,
              std::vector<double>& out) const {
    const size_t base = out.size();
    out.resize(base + width_, 0.0);
    for (const Column& c : columns_) {
      if (c.categorical) {
        out[base + c.offset + static_cast<size_t>(row[c.feature])] = 1.0;
      } else {
        out[base + c.offset] = (row[c.feature] - c.mean) / c.scale;
      }
    }
    if (output_classes_ > 0) out[base + output_offset_ + model_output] = 1.0;
  }

 private:
  struct Column {
    size_t feature;
    bool categorical;
    double mean;
    double scale;
    size_t offset;
  };
  size_t sensitive_;
  int output_classes_;
  std::vector<Column> columns_;
  size_t width_ = 0;
  size_t output_offset_ = 0;
};

// Shared body of the ideal and black-box attacks. `target` is null for the
// ideal attack.
absl::StatusOr<AttackReport> NetAttack(
    const Dataset& attack_train, absl::string_view feature,
    std::span<const AttackInstance> instances, const Model* target,
    const MlpConfig& config) {
  ASSIGN_OR_RETURN(const size_t sensitive,
                   RequireBooleanFeature(attack_train, feature));
  ASSIGN_OR_RETURN(std::vector<double> prior, Prior(attack_train, feature));
  if (prior[0] == 0.0 || prior[1] == 0.0) {
    return absl::FailedPreconditionError(
        absl::StrCat("degenerate attack target: \"", feature,
                     "\" takes a single value in the attack training data"));
  }
  if (target != nullptr) {
    RETURN_IF_ERROR(
        CheckSchemaCompatible(target->schema(), attack_train.schema()));
  }
  const int outputs = target ? attack_train.num_classes() : 0;
  const InputEncoder encoder(attack_train, sensitive, outputs);

  std::vector<double> inputs;
  inputs.reserve(attack_train.num_rows() * encoder.width());
  std::vector<int> targets(attack_train.num_rows());
  for (size_t r = 0; r < attack_train.num_rows(); ++r) {
    int output = 0;
    if (target) {
      ASSIGN_OR_RETURN(output, target->Predict(attack_train.row(r)));
    }
    encoder.Append(attack_train.row(r), output, inputs);
    targets[r] = static_cast<int>(attack_train.value(r, sensitive));
  }
  ASSIGN_OR_RETURN(
      const ShallowNetClassifier net,
      ShallowNetClassifier::Train(inputs, encoder.width(), targets, 2, config));

  size_t correct = 0;
  std::vector<double> x;
  for (const AttackInstance& instance : instances) {
    if (instance.known.size() != attack_train.num_features()) {
      return absl::InvalidArgumentError("attack instance has the wrong width");
    }
    x.clear();
    encoder.Append(instance.known, instance.observed_label, x);
    correct += net.Predict(x) == instance.true_value;
  }
  AttackReport report;
  report.kind = target ? AttackKind::kBlackBox : AttackKind::kIdeal;
  report.num_instances = instances.size();
  report.accuracy =
      instances.empty() ? 0.0 : static_cast<double>(correct) / instances.size();
  report.prior = std::move(prior);
  return report;
}

}  // namespace

absl::string_view AttackKindName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kIdeal:
      return "ideal";
    case AttackKind::kBlackBox:
      return "black_box";
    case AttackKind::kWhiteBox:
      return "white_box";
  }
  return "unknown";
}

absl::string_view InstanceSourceName(InstanceSource source) {
  return source == InstanceSource::kTrain ? "train" : "test";
}

absl::StatusOr<InstanceSource> ParseInstanceSource(absl::string_view name) {
  if (name == "train") return InstanceSource::kTrain;
  if (name == "test") return InstanceSource::kTest;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown instance source \"", name, "\""));
}

absl::StatusOr<size_t> RequireBooleanFeature(const Dataset& data,
                                             absl::string_view feature) {
  ASSIGN_OR_RETURN(const size_t index, data.RequireFeature(feature));
  const FeatureMeta& meta = data.feature(index);
  if (!meta.is_categorical() || meta.categories.size() != 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "attacked feature \"", feature,
        "\" must be boolean (categorical with two values); booleanize it "
        "first"));
  }
  return index;
}

absl::StatusOr<std::vector<AttackInstance>> MakeAttackInstances(
    const Dataset& rows, absl::string_view feature, const Model& target) {
  ASSIGN_OR_RETURN(const size_t sensitive,
                   RequireBooleanFeature(rows, feature));
  RETURN_IF_ERROR(CheckSchemaCompatible(target.schema(), rows.schema()));
  std::vector<AttackInstance> out;
  out.reserve(rows.num_rows());
  for (size_t r = 0; r < rows.num_rows(); ++r) {
    AttackInstance instance;
    ASSIGN_OR_RETURN(instance.observed_label, target.Predict(rows.row(r)));
    instance.known.assign(rows.row(r).begin(), rows.row(r).end());
    instance.true_value = static_cast<int>(instance.known[sensitive]);
    instance.known[sensitive] = kMissingValue;
    out.push_back(std::move(instance));
  }
  return out;
}

absl::StatusOr<AttackReport> IdealAttack(
    const Dataset& attack_train, absl::string_view feature,
    std::span<const AttackInstance> instances, const MlpConfig& config) {
  return NetAttack(attack_train, feature, instances, nullptr, config);
}

absl::StatusOr<AttackReport> BlackBoxAttack(
    const Dataset& attack_train, absl::string_view feature,
    std::span<const AttackInstance> instances, const Model& target,
    const MlpConfig& config) {
  return NetAttack(attack_train, feature, instances, &target, config);
}

int WhiteBoxDecision(const DecisionTree& tree, std::span<const double> known,
                     size_t sensitive, int observed_label,
                     std::span<const double> prior) {
  std::vector<double> row(known.begin(), known.end());
  int leaf[2];
  for (int v = 0; v < 2; ++v) {
    row[sensitive] = v;
    leaf[v] = tree.LeafIndex(row);
  }
  const TreeNode& l0 = tree.nodes()[leaf[0]];
  const TreeNode& l1 = tree.nodes()[leaf[1]];
  if (l0.prediction != l1.prediction) {
    if (l0.prediction == observed_label) return 0;
    if (l1.prediction == observed_label) return 1;
  }
  const double total = tree.total_samples();
  const double s0 = l0.n_samples / total * prior[0];
  const double s1 = l1.n_samples / total * prior[1];
  if (s0 != s1) return s1 > s0 ? 1 : 0;
  return prior[1] > prior[0] ? 1 : 0;
}

absl::StatusOr<AttackReport> WhiteBoxAttack(
    std::span<const AttackInstance> instances, size_t sensitive,
    const DecisionTree& tree, const std::vector<double>& prior) {
  if (!(tree.total_samples() > 0.0)) {
    return absl::FailedPreconditionError(
        "white-box attack needs per-leaf training sample counts");
  }
  if (prior.size() != 2) {
    return absl::InvalidArgumentError("white-box attack needs a boolean prior");
  }
  if (sensitive >= tree.schema().features.size()) {
    return absl::InvalidArgumentError("sensitive feature index out of range");
  }
  size_t correct = 0;
  for (const AttackInstance& instance : instances) {
    if (instance.known.size() != tree.schema().features.size()) {
      return absl::InvalidArgumentError("attack instance has the wrong width");
    }
    correct +=
        WhiteBoxDecision(tree, instance.known, sensitive,
                         instance.observed_label, prior) == instance.true_value;
  }
  AttackReport report;
  report.kind = AttackKind::kWhiteBox;
  report.num_instances = instances.size();
  report.accuracy =
      instances.empty() ? 0.0 : static_cast<double>(correct) / instances.size();
  report.prior = prior;
  return report;
}

absl::StatusOr<std::vector<AttackReport>> EvaluateAttacks(
    const Dataset& train, const Dataset& test, absl::string_view feature,
    const Model& target, const AttackOptions& options,
    const std::optional<AttackReport>& cached_ideal) {
  ASSIGN_OR_RETURN(const size_t sensitive,
                   RequireBooleanFeature(train, feature));
  const Dataset& victims =
      options.source == InstanceSource::kTrain ? train : test;
  ASSIGN_OR_RETURN(const std::vector<AttackInstance> instances,
                   MakeAttackInstances(victims, feature, target));
  ASSIGN_OR_RETURN(const std::vector<double> prior, Prior(train, feature));
  ASSIGN_OR_RETURN(const double model_accuracy, target.Accuracy(test));
  const double importance = target.Importance()[sensitive];

  std::vector<AttackReport> reports;
  if (options.run_ideal) {
    if (cached_ideal) {
      reports.push_back(*cached_ideal);
    } else {
      ASSIGN_OR_RETURN(AttackReport ideal,
                       IdealAttack(train, feature, instances, options.mlp));
      reports.push_back(std::move(ideal));
    }
  }
  ASSIGN_OR_RETURN(
      AttackReport black_box,
      BlackBoxAttack(train, feature, instances, target, options.mlp));
  reports.push_back(std::move(black_box));
  if (const auto* tree = dynamic_cast<const DecisionTree*>(&target)) {
    ASSIGN_OR_RETURN(AttackReport white_box,
                     WhiteBoxAttack(instances, sensitive, *tree, prior));
    reports.push_back(std::move(white_box));
  }
  for (AttackReport& report : reports) {
    report.model_accuracy = model_accuracy;
    report.importance = importance;
    report.prior = prior;
  }
  return reports;
}

}  // namespace privtree
