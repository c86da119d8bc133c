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

// CART-style decision trees with privacy-guided split constraints.
//
// Three constraints reduce the importance of designated sensitive features:
//  * weight penalty: a split on feature f scores
//      S(i) - (1 + w_f) * (E(l_i) + E(r_i)),  E(c) = S(c) * n_c / n_i,
//    so a larger w_f makes the post-split impurity of f look worse;
//  * level threshold: f is not considered at nodes above the threshold;
//  * split budget: f is no longer considered once it has been split on
//    `split_budget` times in the tree (requires breadth-first growth).

#ifndef PRIVTREE_TREE_H_
#define PRIVTREE_TREE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "privtree/dataset.h"
#include "privtree/model.h"

namespace privtree {

enum class SplitCriterion { kEntropy, kGini };
enum class GrowthOrder { kDepthFirst, kBreadthFirst };
// How a level threshold is compared: against node depth, or against the
// node's rank in growth order (its id).
enum class LevelMode { kDepth, kNodeRank };

absl::string_view SplitCriterionName(SplitCriterion criterion);
absl::StatusOr<SplitCriterion> ParseSplitCriterion(absl::string_view name);
absl::string_view GrowthOrderName(GrowthOrder order);
absl::StatusOr<GrowthOrder> ParseGrowthOrder(absl::string_view name);
absl::string_view LevelModeName(LevelMode mode);
absl::StatusOr<LevelMode> ParseLevelMode(absl::string_view name);

struct FeatureSensitivity {
  // In [0, 1]; 0 is a non-sensitive feature.
  double weight = 0.0;
  std::optional<int64_t> level_threshold;
  std::optional<int64_t> split_budget;

  friend bool operator==(const FeatureSensitivity&,
                         const FeatureSensitivity&) = default;
};

// Privacy configuration keyed by feature name. Features without an entry
// are unconstrained.
struct SensitivitySpec {
  std::map<std::string, FeatureSensitivity> features;

  absl::Status Validate() const;
  bool HasSplitBudget() const;
  // Per-feature table in schema order.
  absl::StatusOr<std::vector<FeatureSensitivity>> Resolve(
      const Schema& schema) const;

  friend bool operator==(const SensitivitySpec&,
                         const SensitivitySpec&) = default;
};

struct TreeConfig {
  SplitCriterion criterion = SplitCriterion::kEntropy;
  std::optional<int> max_depth;
  int min_samples_split = 2;
  GrowthOrder growth_order = GrowthOrder::kDepthFirst;
  LevelMode level_mode = LevelMode::kDepth;
  // Features drawn at random per node; 0 considers every feature.
  int feature_subsample = 0;
  uint64_t seed = 0;

  absl::Status Validate() const;

  friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

enum class NodeKind { kInternal, kLeaf };

struct TreeNode {
  NodeKind kind = NodeKind::kLeaf;
  int feature = -1;
  // Rows with value <= threshold go left.
  double threshold = 0.0;
  // Weighted training sample count reaching the node (n_i).
  double n_samples = 0.0;
  // S(i) under the tree's criterion.
  double impurity = 0.0;
  std::vector<double> class_counts;
  int left = -1;
  int right = -1;
  int depth = 0;
  // Majority class (lowest code on ties).
  int prediction = 0;

  bool is_leaf() const { return kind == NodeKind::kLeaf; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct LeafPath {
  int leaf = 0;
  double n_samples = 0.0;
};

// Impurity of a class histogram: entropy in bits, or Gini index.
absl::StatusOr<double> Impurity(std::span<const double> class_counts,
                                SplitCriterion criterion);

// Penalized split score (larger is better). With weight 0 this is the
// classical impurity decrease S(i) - E(l_i) - E(r_i).
absl::StatusOr<double> SplitScore(std::span<const double> node_counts,
                                  std::span<const double> left_counts,
                                  std::span<const double> right_counts,
                                  double weight, SplitCriterion criterion);

class DecisionTree : public Model {
 public:
  static absl::StatusOr<DecisionTree> Train(const Dataset& data,
                                            const SensitivitySpec& sensitivity,
                                            const TreeConfig& config);

  // Training with per-row weights; rows with zero weight are ignored.
  // Weights enter S(i) and n_i as sums.
  static absl::StatusOr<DecisionTree> TrainWeighted(
      const Dataset& data, std::span<const double> weights,
      const SensitivitySpec& sensitivity, const TreeConfig& config);

  // Rebuilds a tree from stored parts, checking the node invariants.
  static absl::StatusOr<DecisionTree> FromNodes(Schema schema,
                                                TreeConfig config,
                                                SensitivitySpec sensitivity,
                                                std::vector<TreeNode> nodes);

  absl::string_view kind() const override { return "decision_tree"; }
  const Schema& schema() const override { return schema_; }
  absl::StatusOr<int> Predict(std::span<const double> row) const override;
  // Post-hoc importance from the stored nodes, normalized.
  ImportanceVector Importance() const override;

  absl::StatusOr<LeafPath> FindLeaf(std::span<const double> row) const;
  // Leaf index for a row of the right width; no checks.
  int LeafIndex(std::span<const double> row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  const TreeConfig& config() const { return config_; }
  const SensitivitySpec& sensitivity() const { return sensitivity_; }
  SplitCriterion criterion() const { return config_.criterion; }
  // N: weighted number of training samples.
  double total_samples() const { return nodes_.front().n_samples; }
  int num_classes() const {
    return static_cast<int>(schema_.label.categories.size());
  }

  // Unnormalized importance sums accumulated while the tree was grown.
  const std::vector<double>& training_importance() const {
    return training_importance_;
  }

  // Number of internal nodes splitting on each feature.
  std::vector<int> SplitCounts() const;
  int Depth() const;
  int NumLeaves() const;

  // Re-walks the internal nodes and checks the level and budget
  // constraints recorded in sensitivity().
  absl::Status AuditConstraints() const;

 private:
  friend class TreeBuilder;

  Schema schema_;
  TreeConfig config_;
  SensitivitySpec sensitivity_;
  std::vector<TreeNode> nodes_;
  std::vector<double> training_importance_;
};

}  // namespace privtree

#endif  // PRIVTREE_TREE_H_
