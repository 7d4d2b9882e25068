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

#ifndef VOXSCREEN_LSTM_HPP_
#define VOXSCREEN_LSTM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "voxscreen/adam.hpp"
#include "voxscreen/rng.hpp"
#include "voxscreen/types.hpp"

namespace voxscreen {

struct LstmArchitecture {
  int input_size = 1;
  int hidden = 64;  // per direction
  int dense = 32;
  double dropout = 0.3;

  std::size_t param_count() const;
  void Validate() const;
};

enum class LstmLoss {
  kMeanAbsoluteError,
  kBinaryCrossEntropy,
};

// Bidirectional LSTM (gate order i, f, g, o) whose final forward and backward
// hidden states are concatenated, then dropout -> dense(ReLU) -> dense(sigmoid).
class BiLstm {
 public:
  BiLstm() = default;
  explicit BiLstm(const LstmArchitecture& arch);

  // Glorot-uniform weights, zero biases except forget gates at 1.
  void InitGlorot(Rng& rng, bool zero_dense = false);

  // sequence is steps x input_size.
  double Predict(const RowMatrix& sequence) const;

  // Adds the gradient of the batch-mean loss into grad; every sequence in the
  // batch must have the same length. Returns the summed (not mean) loss.
  double AccumulateGradient(std::span<const RowMatrix* const> batch, std::span<const int> labels,
                            LstmLoss loss, std::span<double> grad, Rng* dropout_rng,
                            double batch_divisor) const;

  // Swaps the two direction blocks and the matching halves of the first
  // dense layer, so Mirrored().Predict(reverse(x)) == Predict(x).
  BiLstm Mirrored() const;

  const LstmArchitecture& arch() const { return arch_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

 private:
  // Shared forward/backward pass. With empty labels only logits are filled;
  // with an empty grad the backward pass is skipped.
  double Evaluate(std::span<const RowMatrix* const> batch, std::span<const int> labels,
                  LstmLoss loss, std::span<double> grad, Rng* dropout_rng, double batch_divisor,
                  Eigen::RowVectorXd* logits) const;

  struct DirectionOffsets {
    std::size_t wx = 0, wh = 0, b = 0;
  };

  LstmArchitecture arch_;
  AlignedVector<double> params_;
  DirectionOffsets dir_[2];
  std::size_t w1_ = 0, b1_ = 0, w2_ = 0, b2_ = 0;
};

struct LstmTrainOptions {
  int epochs = 100;
  int batch_size = 32;
  AdamOptions adam;
  LstmLoss loss = LstmLoss::kMeanAbsoluteError;
  std::uint64_t seed = 0;
};

struct LstmModel {
  BiLstm net;
  double Score(const RowMatrix& sequence) const { return net.Predict(sequence); }
};

// Treats a feature vector as a sequence of scalars (one step per element).
RowMatrix VectorAsSequence(const Vector& v);
RowMatrix ReverseSequence(const RowMatrix& sequence);

LstmModel TrainLstm(std::span<const RowMatrix> sequences, std::span<const int> labels,
                    const LstmArchitecture& arch, const LstmTrainOptions& options,
                    std::vector<double>* loss_history = nullptr);

}  // namespace voxscreen

#endif  // VOXSCREEN_LSTM_HPP_
