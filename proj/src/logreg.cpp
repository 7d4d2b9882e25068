/*
 * Copyright 2026 The voxscreen Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "voxscreen/logreg.hpp"

#include "voxscreen/activations.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/losses.hpp"

namespace voxscreen {
namespace {

void CheckTrainingSet(std::span<const Vector> rows, std::span<const int> labels) {
  if (rows.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "rows and labels differ in length");
  if (rows.empty()) throw Error(ErrorCode::kSingleClassData, "no training rows");
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kBadLabel, "labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorCode::kSingleClassData, "training labels are all equal");
  const Eigen::Index dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "ragged training rows");
  }
}

}  // namespace

double LogRegModel::Logit(const Vector& x) const {
  if (x.size() != weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "input has " + std::to_string(x.size()) +
                                                   " dims, model " + std::to_string(weights.size()));
  }
  return weights.dot(x) + bias;
}

double LogRegModel::Score(const Vector& x) const { return Sigmoid(Logit(x)); }

double LogRegLoss(const LogRegModel& model, std::span<const Vector> rows,
                  std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    total += BceOfSigmoid(model.Logit(rows[i]), labels[i]).loss;
  }
  return total / static_cast<double>(rows.size());
}

void LogRegGradient(const LogRegModel& model, std::span<const Vector> rows,
                    std::span<const int> labels, Vector* grad_weights, double* grad_bias) {
  Vector gw = Vector::Zero(model.weights.size());
  double gb = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double g = BceOfSigmoid(model.Logit(rows[i]), labels[i]).grad;
    gw += g * rows[i];
    gb += g;
  }
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  *grad_weights = gw * inv_n;
  *grad_bias = gb * inv_n;
}

LogRegModel TrainLogReg(std::span<const Vector> rows, std::span<const int> labels,
                        const LogRegOptions& options, std::vector<double>* loss_history) {
  CheckTrainingSet(rows, labels);
  LogRegModel model;
  model.weights = Vector::Zero(rows.front().size());
  if (loss_history) {
    loss_history->clear();
    loss_history->push_back(LogRegLoss(model, rows, labels));
  }
  Vector gw;
  double gb = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    LogRegGradient(model, rows, labels, &gw, &gb);
    model.weights -= options.learning_rate * gw;
    model.bias -= options.learning_rate * gb;
    if (loss_history) loss_history->push_back(LogRegLoss(model, rows, labels));
  }
  if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
    throw Error(ErrorCode::kNonFiniteLoss, "logistic regression diverged");
  }
  return model;
}

}  // namespace voxscreen
