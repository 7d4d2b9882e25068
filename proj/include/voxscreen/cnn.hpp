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

#ifndef VOXSCREEN_CNN_HPP_
#define VOXSCREEN_CNN_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "voxscreen/adam.hpp"
#include "voxscreen/rng.hpp"
#include "voxscreen/types.hpp"

namespace voxscreen {

// conv(3x3, same) -> ReLU -> maxpool 2x2 -> dropout, twice, then a 2-unit
// softmax dense layer.
struct CnnArchitecture {
  int height = 150;
  int width = 150;
  int channels = 3;
  int filters1 = 16;
  int filters2 = 32;
  double dropout = 0.25;

  int pooled1_h() const { return height / 2; }
  int pooled1_w() const { return width / 2; }
  int pooled2_h() const { return pooled1_h() / 2; }
  int pooled2_w() const { return pooled1_w() / 2; }
  int flat_size() const { return filters2 * pooled2_h() * pooled2_w(); }
  std::size_t input_size() const {
    return static_cast<std::size_t>(height) * width * channels;
  }
  std::size_t param_count() const;
  void Validate() const;
};

template <typename T>
class ConvNet {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMajorMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  // Scratch buffers for one image; reuse across calls to avoid reallocation.
  struct Workspace {
    Matrix cols1, w1_eff, z1, p1, mask1, cols2, z2, p2, mask2, d_p1, dz1, dz2, d_cols2, g_w1_eff;
    std::vector<int> arg1, arg2;
    // Set when every pixel carries the same value in all channels; conv 1
    // then runs on one channel with channel-summed weights.
    bool gray = false;
  };

  ConvNet() = default;
  explicit ConvNet(const CnnArchitecture& arch);

  void InitGlorot(Rng& rng);

  // Class probabilities for one HWC image of arch().input_size() values.
  std::array<T, 2> Predict(std::span<const T> image, Workspace& ws) const;
  std::array<T, 2> Predict(std::span<const T> image) const;

  // Adds d(loss)/d(params) for one example into grad and returns the
  // cross-entropy loss. Dropout is applied iff dropout_rng is non-null.
  T AccumulateGradient(std::span<const T> image, int label, std::span<T> grad,
                       Rng* dropout_rng, Workspace& ws) const;

  const CnnArchitecture& arch() const { return arch_; }
  std::span<T> params() { return params_; }
  std::span<const T> params() const { return params_; }

 private:
  std::array<T, 2> Forward(std::span<const T> image, Rng* dropout_rng, Workspace& ws) const;

  CnnArchitecture arch_;
  AlignedVector<T> params_;
  // Offsets of each tensor inside params_.
  std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0, wd_ = 0, bd_ = 0;
};

extern template class ConvNet<float>;
extern template class ConvNet<double>;

struct CnnTrainOptions {
  int epochs = 100;
  int batch_size = 32;
  AdamOptions adam;
  std::uint64_t seed = 0;
};

struct CnnModel {
  ConvNet<float> net;

  // Probability of class 1.
  double Score(std::span<const float> image) const;
};

// Mini-batch Adam on mean softmax cross-entropy. Examples are reshuffled each
// epoch with the run seed; the final partial batch is kept.
// loss_history receives the mean training loss of every epoch.
CnnModel TrainCnn(std::span<const std::vector<float>> images, std::span<const int> labels,
                  const CnnArchitecture& arch, const CnnTrainOptions& options,
                  std::vector<double>* loss_history = nullptr);

}  // namespace voxscreen

#endif  // VOXSCREEN_CNN_HPP_
