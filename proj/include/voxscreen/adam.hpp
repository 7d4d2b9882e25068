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

#ifndef VOXSCREEN_ADAM_HPP_
#define VOXSCREEN_ADAM_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "voxscreen/error.hpp"

namespace voxscreen {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over one flat parameter vector. Moments are kept in
// double regardless of the parameter type.
class AdamState {
 public:
  AdamState() = default;
  AdamState(std::size_t n_params, AdamOptions options)
      : options_(options), m_(n_params, 0.0), v_(n_params, 0.0) {}

  template <typename T>
  void Step(std::span<T> params, std::span<const T> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "Adam state holds " + std::to_string(m_.size()) + " parameters, got " +
                      std::to_string(params.size()) + "/" + std::to_string(grads.size()));
    }
    for (T g : grads) {
      if (!std::isfinite(static_cast<double>(g))) {
        throw Error(ErrorCode::kNonFiniteGradient, "non-finite gradient at step " +
                                                       std::to_string(step_ + 1));
      }
    }
    ++step_;
    const double b1 = options_.beta1;
    const double b2 = options_.beta2;
    const double m_corr = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double v_corr = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
      const double g = static_cast<double>(grads[i]);
      m_[i] = b1 * m_[i] + (1.0 - b1) * g;
      v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
      const double m_hat = m_[i] / m_corr;
      const double v_hat = v_[i] / v_corr;
      params[i] = static_cast<T>(static_cast<double>(params[i]) -
                                 options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon));
    }
  }

  long long step() const { return step_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  long long step_ = 0;
};

}  // namespace voxscreen

#endif  // VOXSCREEN_ADAM_HPP_
