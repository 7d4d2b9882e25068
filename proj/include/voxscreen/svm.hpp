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

#ifndef VOXSCREEN_SVM_HPP_
#define VOXSCREEN_SVM_HPP_

#include <span>
#include <vector>

#include "voxscreen/types.hpp"

namespace voxscreen {

double RbfKernel(const Vector& x, const Vector& y, double gamma);

struct SvmOptions {
  double c = 1.0;
  double gamma = 0.001;
  double tol = 1e-3;
  // Iteration budget is max_passes * n_rows pair updates.
  int max_passes = 200;
};

struct SvmModel {
  RowMatrix support_vectors;  // one row per support vector
  Vector dual_coefs;          // alpha_i * y_i, y in {-1, +1}
  double bias = 0.0;
  double gamma = 0.001;
  double c = 1.0;
  bool converged = false;
  long long iterations = 0;

  double DecisionValue(const Vector& x) const;
  // sigmoid(DecisionValue); monotone, so ranking metrics are unaffected.
  double Score(const Vector& x) const;
};

struct SvmSolution {
  SvmModel model;
  Vector alphas;  // one per training row, in [0, C]
};

// SMO on the dual. Each step updates the maximal violating pair: the first
// index maximises y_t - f(x_t) over the "up" set, the second minimises it over
// the "low" set, which selects the pair with the largest |E1 - E2| among
// feasible directions. Rows are visited in a canonical order (label, then
// lexicographic features) and ties resolve to the first row in that order, so
// permuting the training set does not change the model. Terminates when the
// pair gap falls below tol, so every training point meets its KKT condition
// within tol / 2. alphas are returned in the caller's row order.
SvmSolution TrainSvmSmo(std::span<const Vector> rows, std::span<const int> labels,
                        const SvmOptions& options = {});

struct KktAudit {
  int violations = 0;
  double worst_violation = 0.0;
  double sum_alpha_y = 0.0;
};

// Recomputes f(x_i) from scratch and checks
//   alpha_i = 0      => y_i f(x_i) >= 1 - tol
//   0 < alpha_i < C  => |y_i f(x_i) - 1| <= tol
//   alpha_i = C      => y_i f(x_i) <= 1 + tol
KktAudit AuditKkt(std::span<const Vector> rows, std::span<const int> labels,
                  const Vector& alphas, double bias, double gamma, double c, double tol);

}  // namespace voxscreen

#endif  // VOXSCREEN_SVM_HPP_
