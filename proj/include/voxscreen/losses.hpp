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

#ifndef VOXSCREEN_LOSSES_HPP_
#define VOXSCREEN_LOSSES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include "voxscreen/activations.hpp"
#include "voxscreen/rng.hpp"

namespace voxscreen {

// Loss of one example as a function of the pre-activation output, with its
// derivative with respect to that pre-activation.
struct LossAndGrad {
  double loss = 0.0;
  double grad = 0.0;
};

// |sigmoid(z) - y|.
inline LossAndGrad MaeOfSigmoid(double logit, int label) {
  const double p = Sigmoid(logit);
  const double diff = p - label;
  const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  return {std::abs(diff), sign * p * (1.0 - p)};
}

// -[y log p + (1 - y) log(1 - p)], p = sigmoid(z), evaluated stably.
inline LossAndGrad BceOfSigmoid(double logit, int label) {
  const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
  return {softplus - label * logit, Sigmoid(logit) - label};
}

template <typename T>
std::array<T, 2> Softmax2(T z0, T z1) {
  const T m = std::max(z0, z1);
  const T e0 = std::exp(z0 - m);
  const T e1 = std::exp(z1 - m);
  const T s = e0 + e1;
  return {e0 / s, e1 / s};
}

// -log softmax(z)[label]; grad is softmax(z) - onehot(label).
template <typename T>
T SoftmaxCrossEntropy2(T z0, T z1, int label, std::array<T, 2>* grad) {
  const auto p = Softmax2(z0, z1);
  const T m = std::max(z0, z1);
  const T log_sum = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
  if (grad) {
    (*grad)[0] = p[0] - (label == 0 ? T(1) : T(0));
    (*grad)[1] = p[1] - (label == 1 ? T(1) : T(0));
  }
  return log_sum - (label == 0 ? z0 : z1);
}

// Inverted dropout: kept values are scaled by 1 / (1 - rate) so that the
// expectation is unchanged. mask receives the multiplier applied to each value.
template <typename T>
void ApplyDropout(std::span<T> values, double rate, Rng& rng, std::span<T> mask) {
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  // One draw from rng keys a counter-based stream; each 64-bit value decides
  // four units through 16-bit lanes.
  const std::uint64_t cut = static_cast<std::uint64_t>(std::llround(rate * 65536.0));
  const std::uint64_t key = rng.NextU64();
  const T scale[2] = {keep_scale, T(0)};
  for (std::size_t block = 0; block * 4 < values.size(); ++block) {
    const std::uint64_t bits = MixSeed(key, block);
    const std::size_t n = std::min<std::size_t>(4, values.size() - block * 4);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = block * 4 + j;
      mask[i] = scale[((bits >> (16 * j)) & 0xFFFF) < cut];
      values[i] *= mask[i];
    }
  }
}

}  // namespace voxscreen

#endif  // VOXSCREEN_LOSSES_HPP_
