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

#ifndef VOXSCREEN_ACTIVATIONS_HPP_
#define VOXSCREEN_ACTIVATIONS_HPP_

#include <cmath>
#include <numbers>

namespace voxscreen {

template <typename T>
inline T Sigmoid(T x) {
  // Branches keep exp() from overflowing for large |x|.
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
inline T SigmoidGrad(T x) {
  const T s = Sigmoid(x);
  return s * (T(1) - s);
}

template <typename T>
inline T Relu(T x) { return x > T(0) ? x : T(0); }

template <typename T>
inline T ReluGrad(T x) { return x > T(0) ? T(1) : T(0); }

// Exact (erf) GELU.
inline double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

inline double GeluGrad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

}  // namespace voxscreen

#endif  // VOXSCREEN_ACTIVATIONS_HPP_
