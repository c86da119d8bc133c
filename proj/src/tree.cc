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

#include "privtree/tree.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "privtree/random.h"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

// Scores within this margin are treated as ties, which are resolved in
// favor of the lower feature index and then the lower threshold.
constexpr double kScoreEpsilon = 1e-12;

double ImpurityOf(std::span<const double> counts, double total,
                  SplitCriterion criterion) {
  if (total <= 0.0) return 0.0;
  double acc = 0.0;
  if (criterion == SplitCriterion::kEntropy) {
    for (double c : counts) {
      if (c <= 0.0) continue;
      const double p = c / total;
      acc -= p * std::log2(p);
    }
    return std::max(acc, 0.0);
  }
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    acc += p * p;
  }
  return std::max(1.0 - acc, 0.0);
}

int Argmax(std::span<const double> counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

bool NearlyEqual(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

absl::string_view SplitCriterionName(SplitCriterion criterion) {
  return criterion == SplitCriterion::kEntropy ? "entropy" : "gini";
}

absl::StatusOr<SplitCriterion> ParseSplitCriterion(absl::string_view name) {
  if (name == "entropy") return SplitCriterion::kEntropy;
  if (name == "gini") return SplitCriterion::kGini;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown split criterion \"", name, "\""));
}

absl::string_view GrowthOrderName(GrowthOrder order) {
  return order == GrowthOrder::kDepthFirst ? "depth_first" : "breadth_first";
}

absl::StatusOr<GrowthOrder> ParseGrowthOrder(absl::string_view name) {
  if (name == "depth_first") return GrowthOrder::kDepthFirst;
  if (name == "breadth_first") return GrowthOrder::kBreadthFirst;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown growth order \"", name, "\""));
}

absl::string_view LevelModeName(LevelMode mode) {
  return mode == LevelMode::kDepth ? "depth" : "node_rank";
}

absl::StatusOr<LevelMode> ParseLevelMode(absl::string_view name) {
  if (name == "depth") return LevelMode::kDepth;
  if (name == "node_rank") return LevelMode::kNodeRank;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown level mode \"", name, "\""));
}

absl::Status SensitivitySpec::Validate() const {
  for (const auto& [name, entry] : features) {
    if (!(entry.weight >= 0.0 && entry.weight <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "weight of \"", name, "\" must lie in [0, 1], got ", entry.weight));
    }
    if (entry.level_threshold && *entry.level_threshold < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative level threshold for \"", name, "\""));
    }
    if (entry.split_budget && *entry.split_budget < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("negative split budget for \"", name, "\""));
    }
  }
  return absl::OkStatus();
}

bool SensitivitySpec::HasSplitBudget() const {
  return std::any_of(features.begin(), features.end(), [](const auto& entry) {
    return entry.second.split_budget.has_value();
  });
}

absl::StatusOr<std::vector<FeatureSensitivity>> SensitivitySpec::Resolve(
    const Schema& schema) const {
  RETURN_IF_ERROR(Validate());
  std::vector<FeatureSensitivity> table(schema.features.size());
  for (const auto& [name, entry] : features) {
    const auto index = schema.FeatureIndex(name);
    if (!index) {
      return absl::InvalidArgumentError(
          absl::StrCat("sensitive feature \"", name, "\" not in schema"));
    }
    table[*index] = entry;
  }
  return table;
}

absl::Status TreeConfig::Validate() const {
  if (min_samples_split < 2) {
    return absl::InvalidArgumentError("min_samples_split must be >= 2");
  }
  if (max_depth && *max_depth < 0) {
    return absl::InvalidArgumentError("max_depth must be >= 0");
  }
  if (feature_subsample < 0) {
    return absl::InvalidArgumentError("feature_subsample must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Impurity(std::span<const double> class_counts,
                                SplitCriterion criterion) {
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0.0 || !std::isfinite(c)) {
      return absl::InvalidArgumentError("class counts must be finite and >= 0");
    }
    total += c;
  }
  if (total <= 0.0) {
    return absl::InvalidArgumentError("impurity of an empty node");
  }
  return ImpurityOf(class_counts, total, criterion);
}

absl::StatusOr<double> SplitScore(std::span<const double> node_counts,
                                  std::span<const double> left_counts,
                                  std::span<const double> right_counts,
                                  double weight, SplitCriterion criterion) {
  if (node_counts.size() != left_counts.size() ||
      node_counts.size() != right_counts.size()) {
    return absl::InvalidArgumentError("class count vectors differ in size");
  }
  double n = 0.0, n_left = 0.0, n_right = 0.0;
  for (size_t c = 0; c < node_counts.size(); ++c) {
    if (!NearlyEqual(node_counts[c], left_counts[c] + right_counts[c])) {
      return absl::InvalidArgumentError(
          "left and right counts do not add up to the node counts");
    }
    n += node_counts[c];
    n_left += left_counts[c];
    n_right += right_counts[c];
  }
  ASSIGN_OR_RETURN(const double node_impurity,
                   Impurity(node_counts, criterion));
  const double left =
      n_left > 0.0 ? ImpurityOf(left_counts, n_left, criterion) * n_left / n
                   : 0.0;
  const double right =
      n_right > 0.0 ? ImpurityOf(right_counts, n_right, criterion) * n_right / n
                    : 0.0;
  return node_impurity - (1.0 + weight) * (left + right);
}

// Grows one tree. Nodes are numbered in creation order; with breadth-first
// growth this is level order and matches the order in which nodes are
// considered for splitting, which is what the split budget counts against.
class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, std::span<const double> weights,
              std::vector<FeatureSensitivity> sensitivity,
              const TreeConfig& config)
      : data_(data),
        weights_(weights),
        sensitivity_(std::move(sensitivity)),
        config_(config),
        rng_(config.seed),
        num_classes_(data.num_classes()),
        split_counts_(data.num_features(), 0),
        importance_(data.num_features(), 0.0) {}

  void Run(std::vector<size_t> rows, DecisionTree& tree) {
    nodes_.push_back(MakeNode(rows, /*depth=*/0));
    total_ = nodes_.front().n_samples;
    std::deque<Pending> frontier;
    frontier.push_back({0, std::move(rows)});
    while (!frontier.empty()) {
      Pending pending;
      if (config_.growth_order == GrowthOrder::kBreadthFirst) {
        pending = std::move(frontier.front());
        frontier.pop_front();
      } else {
        pending = std::move(frontier.back());
        frontier.pop_back();
      }
      const std::optional<Candidate> split =
          FindBestSplit(pending.id, pending.rows);
      if (!split) continue;

      std::vector<size_t> left_rows, right_rows;
      for (size_t r : pending.rows) {
        (data_.value(r, split->feature) <= split->threshold ? left_rows
                                                            : right_rows)
            .push_back(r);
      }
      const int depth = nodes_[pending.id].depth + 1;
      const int left_id = static_cast<int>(nodes_.size());
      nodes_.push_back(MakeNode(left_rows, depth));
      const int right_id = static_cast<int>(nodes_.size());
      nodes_.push_back(MakeNode(right_rows, depth));

      TreeNode& node = nodes_[pending.id];
      node.kind = NodeKind::kInternal;
      node.feature = split->feature;
      node.threshold = split->threshold;
      node.left = left_id;
      node.right = right_id;
      ++split_counts_[split->feature];
      importance_[split->feature] += split->gain * node.n_samples / total_;

      if (config_.growth_order == GrowthOrder::kBreadthFirst) {
        frontier.push_back({left_id, std::move(left_rows)});
        frontier.push_back({right_id, std::move(right_rows)});
      } else {
        frontier.push_back({right_id, std::move(right_rows)});
        frontier.push_back({left_id, std::move(left_rows)});
      }
    }
    tree.nodes_ = std::move(nodes_);
    tree.training_importance_ = std::move(importance_);
  }

 private:
  struct Pending {
    int id = 0;
    std::vector<size_t> rows;
  };

  struct Candidate {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
    double gain = 0.0;
  };

  // Rows sharing one feature value.
  struct Bin {
    double value = 0.0;
    double weight = 0.0;
    std::vector<double> counts;
  };

  TreeNode MakeNode(const std::vector<size_t>& rows, int depth) const {
    TreeNode node;
    node.depth = depth;
    node.class_counts.assign(num_classes_, 0.0);
    for (size_t r : rows) node.class_counts[data_.label(r)] += weights_[r];
    node.n_samples = std::accumulate(node.class_counts.begin(),
                                     node.class_counts.end(), 0.0);
    node.impurity =
        ImpurityOf(node.class_counts, node.n_samples, config_.criterion);
    node.prediction = Argmax(node.class_counts);
    return node;
  }

  bool Eligible(int feature, const TreeNode& node, int node_id) const {
    const FeatureSensitivity& entry = sensitivity_[feature];
    if (entry.level_threshold) {
      const int64_t position =
          config_.level_mode == LevelMode::kDepth ? node.depth : node_id;
      if (position < *entry.level_threshold) return false;
    }
    if (entry.split_budget && split_counts_[feature] >= *entry.split_budget) {
      return false;
    }
    return true;
  }

  std::vector<Bin> BuildBins(int feature,
                             const std::vector<size_t>& rows) const {
    std::vector<Bin> bins;
    const FeatureMeta& meta = data_.feature(feature);
    if (meta.is_categorical()) {
      bins.resize(meta.categories.size());
      for (size_t code = 0; code < bins.size(); ++code) {
        bins[code].value = static_cast<double>(code);
        bins[code].counts.assign(num_classes_, 0.0);
      }
      std::vector<bool> present(bins.size(), false);
      for (size_t r : rows) {
        const auto code = static_cast<size_t>(data_.value(r, feature));
        present[code] = true;
        bins[code].weight += weights_[r];
        bins[code].counts[data_.label(r)] += weights_[r];
      }
      size_t out = 0;
      for (size_t code = 0; code < bins.size(); ++code) {
        if (!present[code]) continue;
        if (out != code) bins[out] = std::move(bins[code]);
        ++out;
      }
      bins.resize(out);
      return bins;
    }
    std::vector<size_t> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) {
      return data_.value(a, feature) < data_.value(b, feature);
    });
    for (size_t r : sorted) {
      const double v = data_.value(r, feature);
      if (bins.empty() || bins.back().value != v) {
        bins.push_back({v, 0.0, std::vector<double>(num_classes_, 0.0)});
      }
      bins.back().weight += weights_[r];
      bins.back().counts[data_.label(r)] += weights_[r];
    }
    return bins;
  }

  std::optional<Candidate> FindBestSplit(int node_id,
                                         const std::vector<size_t>& rows) {
    const TreeNode& node = nodes_[node_id];
    const auto nonzero =
        std::count_if(node.class_counts.begin(), node.class_counts.end(),
                      [](double c) { return c > 0.0; });
    if (nonzero <= 1) return std::nullopt;
    if (static_cast<int>(rows.size()) < config_.min_samples_split) {
      return std::nullopt;
    }
    if (config_.max_depth && node.depth >= *config_.max_depth) {
      return std::nullopt;
    }

    std::vector<int> features;
    for (int f = 0; f < static_cast<int>(data_.num_features()); ++f) {
      if (Eligible(f, node, node_id)) features.push_back(f);
    }
    if (config_.feature_subsample > 0 &&
        static_cast<size_t>(config_.feature_subsample) < features.size()) {
      const size_t k = config_.feature_subsample;
      for (size_t i = 0; i < k; ++i) {
        const size_t j = i + rng_.UniformInt(features.size() - i);
        std::swap(features[i], features[j]);
      }
      features.resize(k);
      std::sort(features.begin(), features.end());
    }

    const double n = node.n_samples;
    Candidate best;
    std::vector<double> left(num_classes_), right(num_classes_);
    for (int f : features) {
      const std::vector<Bin> bins = BuildBins(f, rows);
      if (bins.size() < 2) continue;
      const double penalty = 1.0 + sensitivity_[f].weight;
      std::fill(left.begin(), left.end(), 0.0);
      double n_left = 0.0;
      for (size_t b = 0; b + 1 < bins.size(); ++b) {
        for (int c = 0; c < num_classes_; ++c) {
          left[c] += bins[b].counts[c];
          right[c] = node.class_counts[c] - left[c];
        }
        n_left += bins[b].weight;
        const double n_right = n - n_left;
        const double children =
            ImpurityOf(left, n_left, config_.criterion) * n_left / n +
            ImpurityOf(right, n_right, config_.criterion) * n_right / n;
        const double score = node.impurity - penalty * children;
        if (score > best.score + kScoreEpsilon) {
          best.feature = f;
          best.threshold = 0.5 * (bins[b].value + bins[b + 1].value);
          best.score = score;
          best.gain = node.impurity - children;
        }
      }
    }
    if (best.feature < 0 || best.score <= kScoreEpsilon) return std::nullopt;
    return best;
  }

  const Dataset& data_;
  std::span<const double> weights_;
  std::vector<FeatureSensitivity> sensitivity_;
  const TreeConfig& config_;
  Random rng_;
  const int num_classes_;
  std::vector<TreeNode> nodes_;
  std::vector<int> split_counts_;
  std::vector<double> importance_;
  double total_ = 0.0;
};

absl::StatusOr<DecisionTree> DecisionTree::Train(
    const Dataset& data, const SensitivitySpec& sensitivity,
    const TreeConfig& config) {
  const std::vector<double> weights(data.num_rows(), 1.0);
  return TrainWeighted(data, weights, sensitivity, config);
}

absl::StatusOr<DecisionTree> DecisionTree::TrainWeighted(
    const Dataset& data, std::span<const double> weights,
    const SensitivitySpec& sensitivity, const TreeConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  if (sensitivity.HasSplitBudget() &&
      config.growth_order != GrowthOrder::kBreadthFirst) {
    return absl::FailedPreconditionError(
        "split budgets require breadth-first growth");
  }
  ASSIGN_OR_RETURN(std::vector<FeatureSensitivity> table,
                   sensitivity.Resolve(data.schema()));
  if (weights.size() != data.num_rows()) {
    return absl::InvalidArgumentError("one weight per row is required");
  }
  if (config.feature_subsample > static_cast<int>(data.num_features())) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature_subsample ", config.feature_subsample,
                     " exceeds the ", data.num_features(), " features"));
  }
  if (data.num_classes() == 0) {
    return absl::InvalidArgumentError("label has no classes");
  }
  RETURN_IF_ERROR(data.CheckComplete());
  std::vector<size_t> rows;
  for (size_t r = 0; r < data.num_rows(); ++r) {
    if (!(weights[r] >= 0.0 && std::isfinite(weights[r]))) {
      return absl::InvalidArgumentError("weights must be finite and >= 0");
    }
    if (data.label(r) == kMissingLabel) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", data.row_ids()[r], " has no label"));
    }
    if (weights[r] > 0.0) rows.push_back(r);
  }
  if (rows.empty()) {
    return absl::InvalidArgumentError("empty training data");
  }

  DecisionTree tree;
  tree.schema_ = data.schema();
  tree.config_ = config;
  tree.sensitivity_ = sensitivity;
  TreeBuilder builder(data, weights, std::move(table), config);
  builder.Run(std::move(rows), tree);
  return tree;
}

absl::StatusOr<DecisionTree> DecisionTree::FromNodes(
    Schema schema, TreeConfig config, SensitivitySpec sensitivity,
    std::vector<TreeNode> nodes) {
  RETURN_IF_ERROR(schema.Validate());
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(sensitivity.Resolve(schema).status());
  if (nodes.empty()) return absl::InvalidArgumentError("tree has no nodes");
  const int num_nodes = static_cast<int>(nodes.size());
  const size_t num_classes = schema.label.categories.size();
  const int num_features = static_cast<int>(schema.features.size());
  std::vector<int> parents(num_nodes, 0);
  if (nodes[0].depth != 0) {
    return absl::InvalidArgumentError("root depth must be 0");
  }
  for (int i = 0; i < num_nodes; ++i) {
    const TreeNode& node = nodes[i];
    const auto where = [i](absl::string_view what) {
      return absl::InvalidArgumentError(absl::StrCat("node ", i, ": ", what));
    };
    if (node.class_counts.size() != num_classes) {
      return where("class_counts size differs from the label classes");
    }
    const double sum = std::accumulate(node.class_counts.begin(),
                                       node.class_counts.end(), 0.0);
    if (!NearlyEqual(sum, node.n_samples)) {
      return where("class_counts do not sum to n_samples");
    }
    if (!(node.impurity >= 0.0)) return where("negative impurity");
    if (node.prediction < 0 ||
        node.prediction >= static_cast<int>(num_classes)) {
      return where("prediction out of range");
    }
    if (node.is_leaf()) continue;
    if (node.feature < 0 || node.feature >= num_features) {
      return where("split feature out of range");
    }
    for (int child : {node.left, node.right}) {
      if (child <= i || child >= num_nodes) {
        return where("child index out of range");
      }
      if (nodes[child].depth != node.depth + 1) {
        return where("child depth is not parent depth + 1");
      }
      ++parents[child];
    }
    if (!NearlyEqual(nodes[node.left].n_samples + nodes[node.right].n_samples,
                     node.n_samples)) {
      return where("children n_samples do not add up");
    }
  }
  for (int i = 1; i < num_nodes; ++i) {
    if (parents[i] != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("node ", i, " has ", parents[i], " parents"));
    }
  }

  DecisionTree tree;
  tree.schema_ = std::move(schema);
  tree.config_ = config;
  tree.sensitivity_ = std::move(sensitivity);
  tree.nodes_ = std::move(nodes);
  tree.training_importance_.assign(num_features, 0.0);
  const double total = tree.total_samples();
  for (const TreeNode& node : tree.nodes_) {
    if (node.is_leaf()) continue;
    const TreeNode& l = tree.nodes_[node.left];
    const TreeNode& r = tree.nodes_[node.right];
    const double gain = node.impurity -
                        l.impurity * l.n_samples / node.n_samples -
                        r.impurity * r.n_samples / node.n_samples;
    tree.training_importance_[node.feature] += gain * node.n_samples / total;
  }
  return tree;
}

int DecisionTree::LeafIndex(std::span<const double> row) const {
  int index = 0;
  while (!nodes_[index].is_leaf()) {
    const TreeNode& node = nodes_[index];
    index = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return index;
}

absl::StatusOr<LeafPath> DecisionTree::FindLeaf(
    std::span<const double> row) const {
  if (row.size() != schema_.features.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("row has ", row.size(), " values, schema has ",
                     schema_.features.size(), " features"));
  }
  const int leaf = LeafIndex(row);
  return LeafPath{leaf, nodes_[leaf].n_samples};
}

absl::StatusOr<int> DecisionTree::Predict(std::span<const double> row) const {
  ASSIGN_OR_RETURN(const LeafPath path, FindLeaf(row));
  return nodes_[path.leaf].prediction;
}

ImportanceVector DecisionTree::Importance() const {
  std::vector<double> raw(schema_.features.size(), 0.0);
  const double total = total_samples();
  for (const TreeNode& node : nodes_) {
    if (node.is_leaf()) continue;
    const TreeNode& l = nodes_[node.left];
    const TreeNode& r = nodes_[node.right];
    const double decrease = node.impurity -
                            l.impurity * l.n_samples / node.n_samples -
                            r.impurity * r.n_samples / node.n_samples;
    raw[node.feature] += decrease * node.n_samples / total;
  }
  return NormalizeImportance(std::move(raw));
}

std::vector<int> DecisionTree::SplitCounts() const {
  std::vector<int> counts(schema_.features.size(), 0);
  for (const TreeNode& node : nodes_) {
    if (!node.is_leaf()) ++counts[node.feature];
  }
  return counts;
}

int DecisionTree::Depth() const {
  int depth = 0;
  for (const TreeNode& node : nodes_) depth = std::max(depth, node.depth);
  return depth;
}

int DecisionTree::NumLeaves() const {
  return static_cast<int>(
      std::count_if(nodes_.begin(), nodes_.end(),
                    [](const TreeNode& node) { return node.is_leaf(); }));
}

absl::Status DecisionTree::AuditConstraints() const {
  ASSIGN_OR_RETURN(const std::vector<FeatureSensitivity> table,
                   sensitivity_.Resolve(schema_));
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) continue;
    const FeatureSensitivity& entry = table[node.feature];
    if (!entry.level_threshold) continue;
    const int64_t position =
        config_.level_mode == LevelMode::kDepth ? node.depth : i;
    if (position < *entry.level_threshold) {
      return absl::InternalError(absl::StrFormat(
          "node %d splits on \"%s\" at %s %d, below threshold %d", i,
          schema_.features[node.feature].name,
          LevelModeName(config_.level_mode), position, *entry.level_threshold));
    }
  }
  const std::vector<int> counts = SplitCounts();
  for (size_t f = 0; f < counts.size(); ++f) {
    if (table[f].split_budget && counts[f] > *table[f].split_budget) {
      return absl::InternalError(absl::StrFormat(
          "feature \"%s\" split %d times, budget %d", schema_.features[f].name,
          counts[f], *table[f].split_budget));
    }
  }
  return absl::OkStatus();
}

}  // namespace privtree
