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

#include "privtree/mlp.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "Eigen/Dense"
#include "absl/strings/str_cat.h"
#include "privtree/random.h"

namespace privtree {
namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AdamState {
  Matrix m, v;
  explicit AdamState(const Matrix& like)
      : m(Matrix::Zero(like.rows(), like.cols())),
        v(Matrix::Zero(like.rows(), like.cols())) {}
};

void AdamStep(Matrix& param, const Matrix& grad, AdamState& state, double step,
              const MlpConfig& config) {
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grad;
  state.v =
      config.beta2 * state.v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
  param.array() -=
      step * state.m.array() / (state.v.array().sqrt() + config.epsilon);
}

// Column-wise softmax in place.
void Softmax(Matrix& z) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    auto col = z.col(c);
    col.array() -= col.maxCoeff();
    col = col.array().exp();
    col /= col.sum();
  }
}

Matrix GlorotUniform(int rows, int cols, double bound, Random& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      out(i, j) = (2.0 * rng.UniformDouble() - 1.0) * bound;
    }
  }
  return out;
}

std::vector<double> Flatten(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

}  // namespace

absl::Status MlpConfig::Validate() const {
  if (hidden_units < 1 || max_epochs < 1 || batch_size < 1 || patience < 1) {
    return absl::InvalidArgumentError(
        "hidden_units, max_epochs, batch_size and patience must be >= 1");
  }
  if (!(learning_rate > 0.0) || !(l2 >= 0.0) || !(tolerance >= 0.0) ||
      !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) ||
      !(epsilon > 0.0)) {
    return absl::InvalidArgumentError("invalid optimizer settings");
  }
  return absl::OkStatus();
}

absl::StatusOr<ShallowNetClassifier> ShallowNetClassifier::Train(
    std::span<const double> inputs, size_t num_inputs,
    std::span<const int> labels, int num_classes, const MlpConfig& config) {
  if (const absl::Status status = config.Validate(); !status.ok()) {
    return status;
  }
  const size_t n = labels.size();
  if (n == 0) return absl::InvalidArgumentError("no training samples");
  if (num_inputs == 0) return absl::InvalidArgumentError("no input features");
  if (inputs.size() != n * num_inputs) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", n * num_inputs, " input values, got ", inputs.size()));
  }
  if (num_classes < 2) {
    return absl::InvalidArgumentError("need at least two classes");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", y, " out of range"));
    }
  }
  for (double x : inputs) {
    if (!std::isfinite(x)) {
      return absl::InvalidArgumentError("inputs must be finite");
    }
  }

  const int d = static_cast<int>(num_inputs);
  const int h = config.hidden_units;
  const int k = num_classes;
  Random rng(config.seed);
  Matrix w1 = GlorotUniform(h, d, std::sqrt(6.0 / (d + h)), rng);
  Matrix b1 = GlorotUniform(h, 1, std::sqrt(6.0 / (d + h)), rng);
  Matrix w2 = GlorotUniform(k, h, std::sqrt(6.0 / (h + k)), rng);
  Matrix b2 = GlorotUniform(k, 1, std::sqrt(6.0 / (h + k)), rng);
  AdamState s_w1(w1), s_b1(b1), s_w2(w2), s_b2(b2);

  // Samples as columns.
  const Eigen::Map<const RowMajor> rows(inputs.data(), n, d);
  const Matrix x = rows.transpose();
  Matrix y = Matrix::Zero(k, n);
  for (size_t i = 0; i < n; ++i) y(labels[i], i) = 1.0;

  const size_t batch = static_cast<int>(n) < config.full_batch_below
                           ? n
                           : static_cast<size_t>(config.batch_size);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  ShallowNetClassifier net;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  int64_t t = 0;
  Matrix xb, yb;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    double epoch_loss = 0.0;
    for (size_t start = 0; start < n; start += batch) {
      const size_t b = std::min(batch, n - start);
      xb.resize(d, b);
      yb.resize(k, b);
      for (size_t j = 0; j < b; ++j) {
        xb.col(j) = x.col(order[start + j]);
        yb.col(j) = y.col(order[start + j]);
      }
      Matrix hidden = ((w1 * xb).colwise() + b1.col(0)).cwiseMax(0.0);
      Matrix prob = (w2 * hidden).colwise() + b2.col(0);
      Softmax(prob);

      const double inv_b = 1.0 / static_cast<double>(b);
      double loss = 0.0;
      for (size_t j = 0; j < b; ++j) {
        const Eigen::Index target =
            static_cast<Eigen::Index>(labels[order[start + j]]);
        loss -= std::log(std::max(prob(target, j), 1e-300));
      }
      loss = loss * inv_b +
             0.5 * config.l2 * (w1.squaredNorm() + w2.squaredNorm()) * inv_b;
      epoch_loss += loss * static_cast<double>(b);

      const Matrix dz = (prob - yb) * inv_b;
      const Matrix g_w2 = dz * hidden.transpose() + config.l2 * inv_b * w2;
      const Matrix g_b2 = dz.rowwise().sum();
      const Matrix dh =
          (w2.transpose() * dz)
              .cwiseProduct((hidden.array() > 0.0).cast<double>().matrix());
      const Matrix g_w1 = dh * xb.transpose() + config.l2 * inv_b * w1;
      const Matrix g_b1 = dh.rowwise().sum();

      ++t;
      const double step = config.learning_rate *
                          std::sqrt(1.0 - std::pow(config.beta2, t)) /
                          (1.0 - std::pow(config.beta1, t));
      AdamStep(w1, g_w1, s_w1, step, config);
      AdamStep(b1, g_b1, s_b1, step, config);
      AdamStep(w2, g_w2, s_w2, step, config);
      AdamStep(b2, g_b2, s_b2, step, config);
    }
    epoch_loss /= static_cast<double>(n);
    net.loss_curve_.push_back(epoch_loss);
    net.epochs_run_ = epoch + 1;
    if (epoch_loss > best_loss - config.tolerance) {
      ++stale;
    } else {
      stale = 0;
    }
    best_loss = std::min(best_loss, epoch_loss);
    if (stale >= config.patience) break;
  }

  net.num_inputs_ = num_inputs;
  net.hidden_ = h;
  net.num_classes_ = k;
  net.w1_ = Flatten(w1);
  net.b1_ = Flatten(b1);
  net.w2_ = Flatten(w2);
  net.b2_ = Flatten(b2);
  return net;
}

std::vector<double> ShallowNetClassifier::PredictProba(
    std::span<const double> input) const {
  const Eigen::Map<const Matrix> w1(w1_.data(), hidden_, num_inputs_);
  const Eigen::Map<const Vector> b1(b1_.data(), hidden_);
  const Eigen::Map<const Matrix> w2(w2_.data(), num_classes_, hidden_);
  const Eigen::Map<const Vector> b2(b2_.data(), num_classes_);
  const Eigen::Map<const Vector> x(input.data(), num_inputs_);
  const Vector hidden = (w1 * x + b1).cwiseMax(0.0);
  Matrix z = w2 * hidden + b2;
  Softmax(z);
  return Flatten(z);
}

int ShallowNetClassifier::Predict(std::span<const double> input) const {
  const std::vector<double> p = PredictProba(input);
  int best = 0;
  for (int c = 1; c < num_classes_; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

}  // namespace privtree
