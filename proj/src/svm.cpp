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

#include "voxscreen/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "voxscreen/activations.hpp"
#include "voxscreen/error.hpp"

namespace voxscreen {
namespace {

constexpr std::size_t kMaxCachedRows = 6000;

class KernelRows {
 public:
  KernelRows(std::span<const Vector> rows, double gamma) : rows_(rows), gamma_(gamma) {
    const std::size_t n = rows.size();
    if (n <= kMaxCachedRows) {
      full_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        full_(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
          full_(i, j) = full_(j, i) = RbfKernel(rows[i], rows[j], gamma);
        }
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (full_.size() > 0) return full_(i, j);
    return RbfKernel(rows_[i], rows_[j], gamma_);
  }

 private:
  std::span<const Vector> rows_;
  double gamma_;
  Eigen::MatrixXd full_;
};

}  // namespace

double RbfKernel(const Vector& x, const Vector& y, double gamma) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel arguments differ in dimension");
  }
  if (!(gamma > 0.0)) throw Error(ErrorCode::kConfigError, "gamma must be positive");
  return std::exp(-gamma * (x - y).squaredNorm());
}

double SvmModel::DecisionValue(const Vector& x) const {
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    f += dual_coefs(i) * RbfKernel(support_vectors.row(i).transpose(), x, gamma);
  }
  return f;
}

double SvmModel::Score(const Vector& x) const { return Sigmoid(DecisionValue(x)); }

namespace {

SvmSolution Solve(std::span<const Vector> rows, std::span<const int> labels, const SvmOptions& options) {
  const std::size_t n = rows.size();
  if (labels.size() != n) throw Error(ErrorCode::kLengthMismatch, "rows and labels differ in length");
  if (!(options.c > 0.0) || !(options.gamma > 0.0) || !(options.tol > 0.0)) {
    throw Error(ErrorCode::kConfigError, "C, gamma and tol must be positive");
  }
  std::vector<double> y(n);
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::kBadLabel, "labels must be 0 or 1");
    seen[labels[i]] = true;
    y[i] = labels[i] == 1 ? 1.0 : -1.0;
    if (rows[i].size() != rows[0].size()) throw Error(ErrorCode::kDimensionMismatch, "ragged rows");
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorCode::kSingleClassData, "SVM needs both classes");

  const double c = options.c;
  const KernelRows kernel(rows, options.gamma);
  std::vector<double> alpha(n, 0.0);
  // f_nob[t] = sum_s alpha_s y_s K(s, t), i.e. the decision value without bias.
  std::vector<double> f_nob(n, 0.0);

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
  };

  const long long max_iterations = static_cast<long long>(options.max_passes) * static_cast<long long>(n);
  long long iterations = 0;
  bool converged = false;
  double up_max = 0.0, low_min = 0.0;
  while (true) {
    // v_t = y_t - f_nob(x_t); the optimal bias equals v_t on every free vector.
    std::size_t i = n, j = n;
    up_max = -std::numeric_limits<double>::infinity();
    low_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = y[t] - f_nob[t];
      if (in_up(t) && v > up_max) {
        up_max = v;
        i = t;
      }
      if (in_low(t) && v < low_min) {
        low_min = v;
        j = t;
      }
    }
    if (i == n || j == n || up_max - low_min < options.tol) {
      converged = true;
      break;
    }
    if (iterations >= max_iterations) break;
    ++iterations;

    const double k_ii = kernel(i, i), k_jj = kernel(j, j), k_ij = kernel(i, j);
    const double eta = std::max(k_ii + k_jj - 2.0 * k_ij, 1e-12);
    // E_t = f_nob(x_t) - y_t; bias cancels in the difference.
    const double e_i = f_nob[i] - y[i];
    const double e_j = f_nob[j] - y[j];
    const double s = y[i] * y[j];
    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, alpha[j] - alpha[i]);
      hi = std::min(c, c + alpha[j] - alpha[i]);
    } else {
      lo = std::max(0.0, alpha[i] + alpha[j] - c);
      hi = std::min(c, alpha[i] + alpha[j]);
    }
    double aj = std::clamp(alpha[j] + y[j] * (e_i - e_j) / eta, lo, hi);
    double ai = alpha[i] + s * (alpha[j] - aj);
    ai = std::clamp(ai, 0.0, c);
    // Snap tiny residues onto the box so the active sets stay exact.
    const double snap = 1e-13 * c;
    if (ai < snap) ai = 0.0;
    if (ai > c - snap) ai = c;
    if (aj < snap) aj = 0.0;
    if (aj > c - snap) aj = c;
    const double d_i = (ai - alpha[i]) * y[i];
    const double d_j = (aj - alpha[j]) * y[j];
    alpha[i] = ai;
    alpha[j] = aj;
    if (d_i == 0.0 && d_j == 0.0) {
      // No representable progress on the maximal pair; further sweeps would
      // select it again.
      break;
    }
    for (std::size_t t = 0; t < n; ++t) f_nob[t] += d_i * kernel(i, t) + d_j * kernel(j, t);
  }

  double bias = 0.0;
  double free_sum = 0.0;
  int free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < c) {
      free_sum += y[t] - f_nob[t];
      ++free_count;
    }
  }
  if (free_count > 0) {
    bias = free_sum / free_count;
  } else if (std::isfinite(up_max) && std::isfinite(low_min)) {
    bias = 0.5 * (up_max + low_min);
  }

  SvmSolution out;
  out.alphas = Vector::Map(alpha.data(), static_cast<Eigen::Index>(n));
  SvmModel& model = out.model;
  model.bias = bias;
  model.gamma = options.gamma;
  model.c = c;
  model.converged = converged;
  model.iterations = iterations;
  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), rows[0].size());
  model.dual_coefs.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = rows[sv[k]].transpose();
    model.dual_coefs(static_cast<Eigen::Index>(k)) = alpha[sv[k]] * y[sv[k]];
  }
  return out;
}

}  // namespace

// The solver runs on rows in a canonical (label, lexicographic) order, so the
// result does not depend on how the caller ordered the training set.
SvmSolution TrainSvmSmo(std::span<const Vector> rows, std::span<const int> labels,
                        const SvmOptions& options) {
  if (labels.size() != rows.size()) throw Error(ErrorCode::kLengthMismatch, "rows and labels differ in length");
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (labels[a] != labels[b]) return labels[a] < labels[b];
    return std::lexicographical_compare(rows[a].begin(), rows[a].end(), rows[b].begin(), rows[b].end());
  });
  std::vector<Vector> sorted_rows;
  std::vector<int> sorted_labels;
  sorted_rows.reserve(rows.size());
  for (std::size_t i : order) {
    sorted_rows.push_back(rows[i]);
    sorted_labels.push_back(labels[i]);
  }
  SvmSolution out = Solve(sorted_rows, sorted_labels, options);
  Vector alphas(out.alphas.size());
  for (std::size_t k = 0; k < order.size(); ++k) alphas(static_cast<Eigen::Index>(order[k])) = out.alphas(static_cast<Eigen::Index>(k));
  out.alphas = alphas;
  return out;
}

KktAudit AuditKkt(std::span<const Vector> rows, std::span<const int> labels, const Vector& alphas,
                  double bias, double gamma, double c, double tol) {
  KktAudit audit;
  const std::size_t n = rows.size();
  for (std::size_t t = 0; t < n; ++t) {
    const double yt = labels[t] == 1 ? 1.0 : -1.0;
    audit.sum_alpha_y += alphas(static_cast<Eigen::Index>(t)) * yt;
  }
  for (std::size_t t = 0; t < n; ++t) {
    double f = bias;
    for (std::size_t s = 0; s < n; ++s) {
      const double a = alphas(static_cast<Eigen::Index>(s));
      if (a == 0.0) continue;
      f += a * (labels[s] == 1 ? 1.0 : -1.0) * RbfKernel(rows[s], rows[t], gamma);
    }
    const double margin = (labels[t] == 1 ? 1.0 : -1.0) * f;
    const double a = alphas(static_cast<Eigen::Index>(t));
    double violation = 0.0;
    if (a <= 0.0) {
      violation = std::max(0.0, (1.0 - tol) - margin);
    } else if (a >= c) {
      violation = std::max(0.0, margin - (1.0 + tol));
    } else {
      violation = std::max(0.0, std::abs(margin - 1.0) - tol);
    }
    if (violation > 0.0) ++audit.violations;
    audit.worst_violation = std::max(audit.worst_violation, violation);
  }
  return audit;
}

}  // namespace voxscreen
