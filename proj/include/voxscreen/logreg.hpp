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

#ifndef VOXSCREEN_LOGREG_HPP_
#define VOXSCREEN_LOGREG_HPP_

#include <span>
#include <vector>

#include "voxscreen/types.hpp"

namespace voxscreen {

struct LogRegModel {
  Vector weights;
  double bias = 0.0;

  double Logit(const Vector& x) const;
  double Score(const Vector& x) const;  // sigmoid(logit)
};

// Full-batch gradient descent on mean binary cross-entropy, zero init,
// no regularisation.
struct LogRegOptions {
  int epochs = 500;
  double learning_rate = 0.1;
};

double LogRegLoss(const LogRegModel& model, std::span<const Vector> rows,
                  std::span<const int> labels);
// Gradient of LogRegLoss with respect to (weights, bias).
void LogRegGradient(const LogRegModel& model, std::span<const Vector> rows,
                    std::span<const int> labels, Vector* grad_weights, double* grad_bias);

// loss_history, when given, receives the loss before training and after
// every epoch (epochs + 1 entries).
LogRegModel TrainLogReg(std::span<const Vector> rows, std::span<const int> labels,
                        const LogRegOptions& options = {},
                        std::vector<double>* loss_history = nullptr);

}  // namespace voxscreen

#endif  // VOXSCREEN_LOGREG_HPP_
