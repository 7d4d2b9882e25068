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

#include "voxscreen/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "voxscreen/error.hpp"
#include "voxscreen/losses.hpp"

namespace voxscreen {
namespace {

// Same-padded 3x3 patches. x is channels x (h*w), column-major with one
// column per pixel; cols gets 9*channels rows ordered (tap, channel).
// stride is the distance between pixels in x; it defaults to channels.
template <typename T>
void Im2Col3x3(const T* x, int channels, int h, int w,
               Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& cols, int stride = 0) {
  if (stride == 0) stride = channels;
  cols.resize(9 * channels, static_cast<Eigen::Index>(h) * w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      T* dst = cols.col(static_cast<Eigen::Index>(r) * w + c).data();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) {
            std::fill(dst, dst + channels, T(0));
          } else {
            const T* src = x + (static_cast<std::size_t>(rr) * w + cc) * stride;
            std::copy(src, src + channels, dst);
          }
          dst += channels;
        }
      }
    }
  }
}

// 2x2/2 max-pool over ReLU(z). arg records, per (channel, output pixel), the
// input pixel that won; the first maximum wins ties.
template <typename T>
void ReluMaxPool(const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& z, int h, int w,
                 Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& out, std::vector<int>& arg) {
  const int channels = static_cast<int>(z.rows());
  const int ph = h / 2, pw = w / 2;
  out.resize(channels, static_cast<Eigen::Index>(ph) * pw);
  arg.resize(static_cast<std::size_t>(channels) * ph * pw);
  for (int r = 0; r < ph; ++r) {
    for (int c = 0; c < pw; ++c) {
      const int q = r * pw + c;
      const int p[4] = {(2 * r) * w + 2 * c, (2 * r) * w + 2 * c + 1, (2 * r + 1) * w + 2 * c,
                        (2 * r + 1) * w + 2 * c + 1};
      for (int ch = 0; ch < channels; ++ch) {
        int best = p[0];
        T best_v = std::max(z(ch, p[0]), T(0));
        for (int k = 1; k < 4; ++k) {
          const T v = std::max(z(ch, p[k]), T(0));
          if (v > best_v) {
            best_v = v;
            best = p[k];
          }
        }
        out(ch, q) = best_v;
        arg[static_cast<std::size_t>(q) * channels + ch] = best;
      }
    }
  }
}

template <typename T>
bool IsGray(const T* x, int channels, int pixels) {
  for (int p = 0; p < pixels; ++p) {
    const T* px = x + static_cast<std::size_t>(p) * channels;
    for (int ch = 1; ch < channels; ++ch) {
      if (px[ch] != px[0]) return false;
    }
  }
  return true;
}

double GlorotBound(int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); }

}  // namespace

std::size_t CnnArchitecture::param_count() const {
  const std::size_t conv1 = static_cast<std::size_t>(filters1) * 9 * channels + filters1;
  const std::size_t conv2 = static_cast<std::size_t>(filters2) * 9 * filters1 + filters2;
  const std::size_t dense = 2 * static_cast<std::size_t>(flat_size()) + 2;
  return conv1 + conv2 + dense;
}

void CnnArchitecture::Validate() const {
  if (height < 4 || width < 4 || channels < 1 || filters1 < 1 || filters2 < 1) {
    throw Error(ErrorCode::kConfigError, "CNN input must be at least 4x4 with positive filter counts");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorCode::kConfigError, "dropout must be in [0, 1)");
}

template <typename T>
ConvNet<T>::ConvNet(const CnnArchitecture& arch) : arch_(arch) {
  arch_.Validate();
  std::size_t at = 0;
  w1_ = at; at += static_cast<std::size_t>(arch.filters1) * 9 * arch.channels;
  b1_ = at; at += arch.filters1;
  w2_ = at; at += static_cast<std::size_t>(arch.filters2) * 9 * arch.filters1;
  b2_ = at; at += arch.filters2;
  wd_ = at; at += 2 * static_cast<std::size_t>(arch.flat_size());
  bd_ = at; at += 2;
  params_.assign(at, T(0));
}

template <typename T>
void ConvNet<T>::InitGlorot(Rng& rng) {
  std::fill(params_.begin(), params_.end(), T(0));
  auto fill = [&](std::size_t offset, std::size_t count, double bound) {
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = static_cast<T>(rng.Uniform(-bound, bound));
  };
  const auto& a = arch_;
  fill(w1_, b1_ - w1_, GlorotBound(9 * a.channels, 9 * a.filters1));
  fill(w2_, b2_ - w2_, GlorotBound(9 * a.filters1, 9 * a.filters2));
  fill(wd_, bd_ - wd_, GlorotBound(a.flat_size(), 2));
}

template <typename T>
std::array<T, 2> ConvNet<T>::Forward(std::span<const T> image, Rng* dropout_rng,
                                     Workspace& ws) const {
  const auto& a = arch_;
  if (image.size() != a.input_size()) {
    throw Error(ErrorCode::kShapeMismatch, "image has " + std::to_string(image.size()) +
                                               " values, network expects " +
                                               std::to_string(a.input_size()));
  }
  Eigen::Map<const RowMajorMatrix> w1(params_.data() + w1_, a.filters1, 9 * a.channels);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b1(params_.data() + b1_, a.filters1);
  Eigen::Map<const RowMajorMatrix> w2(params_.data() + w2_, a.filters2, 9 * a.filters1);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b2(params_.data() + b2_, a.filters2);
  Eigen::Map<const RowMajorMatrix> wd(params_.data() + wd_, 2, a.flat_size());

  ws.gray = a.channels > 1 && IsGray(image.data(), a.channels, a.height * a.width);
  if (ws.gray) {
    ws.w1_eff.resize(a.filters1, 9);
    for (int tap = 0; tap < 9; ++tap) ws.w1_eff.col(tap) = w1.middleCols(tap * a.channels, a.channels).rowwise().sum();
    Im2Col3x3(image.data(), 1, a.height, a.width, ws.cols1, a.channels);
    ws.z1.noalias() = ws.w1_eff * ws.cols1;
  } else {
    Im2Col3x3(image.data(), a.channels, a.height, a.width, ws.cols1);
    ws.z1.noalias() = w1 * ws.cols1;
  }
  ws.z1.colwise() += b1;
  ReluMaxPool(ws.z1, a.height, a.width, ws.p1, ws.arg1);
  if (dropout_rng) {
    ws.mask1.resize(ws.p1.rows(), ws.p1.cols());
    ApplyDropout<T>({ws.p1.data(), static_cast<std::size_t>(ws.p1.size())}, a.dropout, *dropout_rng,
                    {ws.mask1.data(), static_cast<std::size_t>(ws.mask1.size())});
  }
  Im2Col3x3(ws.p1.data(), a.filters1, a.pooled1_h(), a.pooled1_w(), ws.cols2);
  ws.z2.noalias() = w2 * ws.cols2;
  ws.z2.colwise() += b2;
  ReluMaxPool(ws.z2, a.pooled1_h(), a.pooled1_w(), ws.p2, ws.arg2);
  if (dropout_rng) {
    ws.mask2.resize(ws.p2.rows(), ws.p2.cols());
    ApplyDropout<T>({ws.p2.data(), static_cast<std::size_t>(ws.p2.size())}, a.dropout, *dropout_rng,
                    {ws.mask2.data(), static_cast<std::size_t>(ws.mask2.size())});
  }
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> flat(ws.p2.data(), a.flat_size());
  const T z0 = wd.row(0).dot(flat) + params_[bd_];
  const T z1 = wd.row(1).dot(flat) + params_[bd_ + 1];
  return {z0, z1};
}

template <typename T>
std::array<T, 2> ConvNet<T>::Predict(std::span<const T> image, Workspace& ws) const {
  const auto logits = Forward(image, nullptr, ws);
  return Softmax2(logits[0], logits[1]);
}

template <typename T>
std::array<T, 2> ConvNet<T>::Predict(std::span<const T> image) const {
  Workspace ws;
  return Predict(image, ws);
}

template <typename T>
T ConvNet<T>::AccumulateGradient(std::span<const T> image, int label, std::span<T> grad,
                                 Rng* dropout_rng, Workspace& ws) const {
  if (grad.size() != params_.size()) throw Error(ErrorCode::kShapeMismatch, "gradient buffer size");
  const auto& a = arch_;
  const auto logits = Forward(image, dropout_rng, ws);
  std::array<T, 2> d_logits;
  const T loss = SoftmaxCrossEntropy2(logits[0], logits[1], label, &d_logits);

  const int f1 = a.filters1, f2 = a.filters2;
  const int flat_n = a.flat_size();
  Eigen::Map<const RowMajorMatrix> w2(params_.data() + w2_, f2, 9 * f1);
  Eigen::Map<const RowMajorMatrix> wd(params_.data() + wd_, 2, flat_n);
  Eigen::Map<RowMajorMatrix> g_w1(grad.data() + w1_, f1, 9 * a.channels);
  Eigen::Map<RowMajorMatrix> g_w2(grad.data() + w2_, f2, 9 * f1);
  Eigen::Map<RowMajorMatrix> g_wd(grad.data() + wd_, 2, flat_n);
  T* g_b1 = grad.data() + b1_;
  T* g_b2 = grad.data() + b2_;

  // Dense layer.
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> flat(ws.p2.data(), flat_n);
  g_wd.row(0) += d_logits[0] * flat;
  g_wd.row(1) += d_logits[1] * flat;
  grad[bd_] += d_logits[0];
  grad[bd_ + 1] += d_logits[1];

  // Back through dropout 2, pool 2 and ReLU 2. Each pooled output routes to
  // a single winner, so dz2 is filled by scatter.
  const int h1 = a.pooled1_h(), w1 = a.pooled1_w();
  const int pixels1 = h1 * w1;
  ws.dz2.setZero(f2, pixels1);
  const int pooled2 = a.pooled2_h() * a.pooled2_w();
  for (int q = 0; q < pooled2; ++q) {
    for (int o = 0; o < f2; ++o) {
      const std::size_t flat_index = static_cast<std::size_t>(q) * f2 + o;
      T g = wd(0, static_cast<Eigen::Index>(flat_index)) * d_logits[0] +
            wd(1, static_cast<Eigen::Index>(flat_index)) * d_logits[1];
      if (dropout_rng) g *= ws.mask2(o, q);
      const int p = ws.arg2[flat_index];
      if (ws.z2(o, p) > T(0)) ws.dz2(o, p) = g;
    }
  }
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>(g_b2, f2) += ws.dz2.rowwise().sum();
  g_w2.noalias() += ws.dz2 * ws.cols2.transpose();

  // Conv 2 input gradient: columns of w2^T dz2, folded back onto pixels.
  ws.d_cols2.noalias() = w2.transpose() * ws.dz2;
  ws.d_p1.setZero(f1, pixels1);
  for (int r = 0; r < h1; ++r) {
    for (int c = 0; c < w1; ++c) {
      const T* src = ws.d_cols2.col(static_cast<Eigen::Index>(r) * w1 + c).data();
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc, src += f1) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h1 || cc < 0 || cc >= w1) continue;
          T* dst = ws.d_p1.col(static_cast<Eigen::Index>(rr) * w1 + cc).data();
          for (int ch = 0; ch < f1; ++ch) dst[ch] += src[ch];
        }
      }
    }
  }

  // Back through dropout 1, pool 1, ReLU 1 into conv 1's weights.
  ws.dz1.setZero(f1, static_cast<Eigen::Index>(a.height) * a.width);
  for (int q = 0; q < pixels1; ++q) {
    for (int o = 0; o < f1; ++o) {
      T g = ws.d_p1(o, q);
      if (dropout_rng) g *= ws.mask1(o, q);
      const int p = ws.arg1[static_cast<std::size_t>(q) * f1 + o];
      if (ws.z1(o, p) > T(0)) ws.dz1(o, p) = g;
    }
  }
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>(g_b1, f1) += ws.dz1.rowwise().sum();
  if (ws.gray) {
    ws.g_w1_eff.noalias() = ws.dz1 * ws.cols1.transpose();
    for (int tap = 0; tap < 9; ++tap) {
      for (int ch = 0; ch < a.channels; ++ch) g_w1.col(tap * a.channels + ch) += ws.g_w1_eff.col(tap);
    }
  } else {
    g_w1.noalias() += ws.dz1 * ws.cols1.transpose();
  }
  return loss;
}

template class ConvNet<float>;
template class ConvNet<double>;

double CnnModel::Score(std::span<const float> image) const {
  return static_cast<double>(net.Predict(image)[1]);
}

CnnModel TrainCnn(std::span<const std::vector<float>> images, std::span<const int> labels,
                  const CnnArchitecture& arch, const CnnTrainOptions& options,
                  std::vector<double>* loss_history) {
  if (images.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "images and labels differ in length");
  if (images.size() < 2) throw Error(ErrorCode::kSingleClassData, "need at least two examples");
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kBadLabel, "labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorCode::kSingleClassData, "CNN needs both classes");
  if (options.epochs < 0 || options.batch_size < 1) throw Error(ErrorCode::kConfigError, "bad epochs/batch size");

  CnnModel model;
  model.net = ConvNet<float>(arch);
  Rng init_rng(MixSeed(options.seed, 1));
  Rng dropout_rng(MixSeed(options.seed, 2));
  Rng order_rng(MixSeed(options.seed, 3));
  model.net.InitGlorot(init_rng);
  AdamState adam(model.net.params().size(), options.adam);
  AlignedVector<float> grad(model.net.params().size());
  typename ConvNet<float>::Workspace ws;

  std::vector<std::size_t> order(images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (loss_history) loss_history->clear();
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    order_rng.Shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0f);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& img = images[order[k]];
        batch_loss += model.net.AccumulateGradient(img, labels[order[k]], grad, &dropout_rng, ws);
      }
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::kNonFiniteLoss, "CNN loss diverged at epoch " + std::to_string(epoch) +
                                                   ", batch starting at " + std::to_string(start));
      }
      const float inv = 1.0f / static_cast<float>(end - start);
      for (float& g : grad) g *= inv;
      adam.Step<float>(model.net.params(), grad);
      epoch_loss += batch_loss;
    }
    if (loss_history) loss_history->push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return model;
}

}  // namespace voxscreen
