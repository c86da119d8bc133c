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

// One-hidden-layer ReLU network with a softmax output, trained by Adam on
// cross-entropy with L2 regularization. Used as the attacker's classifier.

#ifndef PRIVTREE_MLP_H_
#define PRIVTREE_MLP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace privtree {

struct MlpConfig {
  int hidden_units = 100;
  int max_epochs = 200;
  int batch_size = 32;
  // Training sets smaller than this use a single full batch.
  int full_batch_below = 200;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2 = 1e-4;
  // Training stops once the epoch loss has failed to improve on the best
  // loss by `tolerance` for `patience` consecutive epochs.
  double tolerance = 1e-4;
  int patience = 10;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

class ShallowNetClassifier {
 public:
  // `inputs` is row-major with `num_inputs` columns; labels lie in
  // [0, num_classes).
  static absl::StatusOr<ShallowNetClassifier> Train(
      std::span<const double> inputs, size_t num_inputs,
      std::span<const int> labels, int num_classes, const MlpConfig& config);

  std::vector<double> PredictProba(std::span<const double> input) const;
  // Most probable class; ties go to the lowest class.
  int Predict(std::span<const double> input) const;

  size_t num_inputs() const { return num_inputs_; }
  int num_classes() const { return num_classes_; }
  int epochs_run() const { return epochs_run_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }

 private:
  size_t num_inputs_ = 0;
  int hidden_ = 0;
  int num_classes_ = 0;
  // Column-major parameter blocks: w1 is hidden x inputs, w2 is
  // classes x hidden.
  std::vector<double> w1_, b1_, w2_, b2_;
  int epochs_run_ = 0;
  std::vector<double> loss_curve_;
};

}  // namespace privtree

#endif  // PRIVTREE_MLP_H_
