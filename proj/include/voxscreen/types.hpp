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

#ifndef VOXSCREEN_TYPES_HPP_
#define VOXSCREEN_TYPES_HPP_

#include <vector>

#include <Eigen/Dense>

namespace voxscreen {

// Feature matrices are stored frames x coefficients, row-major.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Eigen's vectorized kernels peel loops by the runtime address, so buffers
// that feed them are over-aligned to keep results independent of where the
// allocator placed them.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

}  // namespace voxscreen

#endif  // VOXSCREEN_TYPES_HPP_
