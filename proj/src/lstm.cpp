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

#include "voxscreen/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "voxscreen/activations.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/losses.hpp"

namespace voxscreen {
namespace {

using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Column block s (width = batch) holds processing step s; the backward
// direction processes time steps in reverse.
struct DirectionTrace {
  Mat x;      // input x steps*batch
  Mat gates;  // 4H x steps*batch, activated i, f, g, o
  Mat c, tanh_c, h;
};

double GlorotBound(int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); }

}  // namespace

std::size_t LstmArchitecture::param_count() const {
  const std::size_t per_dir = 4 * static_cast<std::size_t>(hidden) * (input_size + hidden + 1);
  return 2 * per_dir + static_cast<std::size_t>(dense) * (2 * hidden + 1) + dense + 1;
}

void LstmArchitecture::Validate() const {
  if (input_size < 1 || hidden < 1 || dense < 1) throw Error(ErrorCode::kConfigError, "LSTM sizes must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorCode::kConfigError, "dropout must be in [0, 1)");
}

BiLstm::BiLstm(const LstmArchitecture& arch) : arch_(arch) {
  arch_.Validate();
  const std::size_t h4 = 4 * static_cast<std::size_t>(arch.hidden);
  std::size_t at = 0;
  for (auto& d : dir_) {
    d.wx = at; at += h4 * arch.input_size;
    d.wh = at; at += h4 * arch.hidden;
    d.b = at; at += h4;
  }
  w1_ = at; at += static_cast<std::size_t>(arch.dense) * 2 * arch.hidden;
  b1_ = at; at += arch.dense;
  w2_ = at; at += arch.dense;
  b2_ = at; at += 1;
  params_.assign(at, 0.0);
}

void BiLstm::InitGlorot(Rng& rng, bool zero_dense) {
  std::fill(params_.begin(), params_.end(), 0.0);
  const int hdim = arch_.hidden;
  auto fill = [&](std::size_t offset, std::size_t count, double bound) {
    for (std::size_t k = 0; k < count; ++k) params_[offset + k] = rng.Uniform(-bound, bound);
  };
  for (const auto& d : dir_) {
    fill(d.wx, d.wh - d.wx, GlorotBound(arch_.input_size, 4 * hdim));
    fill(d.wh, d.b - d.wh, GlorotBound(hdim, 4 * hdim));
    for (int k = 0; k < hdim; ++k) params_[d.b + hdim + k] = 1.0;
  }
  if (!zero_dense) {
    fill(w1_, b1_ - w1_, GlorotBound(2 * hdim, arch_.dense));
    fill(w2_, b2_ - w2_, GlorotBound(arch_.dense, 1));
  }
}

double BiLstm::AccumulateGradient(std::span<const RowMatrix* const> batch,
                                  std::span<const int> labels, LstmLoss loss_kind,
                                  std::span<double> grad, Rng* dropout_rng,
                                  double batch_divisor) const {
  if (labels.size() != batch.size()) throw Error(ErrorCode::kLengthMismatch, "batch and labels differ in length");
  if (grad.size() != params_.size()) throw Error(ErrorCode::kShapeMismatch, "gradient buffer size");
  return Evaluate(batch, labels, loss_kind, grad, dropout_rng, batch_divisor, nullptr);
}

double BiLstm::Evaluate(std::span<const RowMatrix* const> batch, std::span<const int> labels,
                        LstmLoss loss_kind, std::span<double> grad, Rng* dropout_rng,
                        double batch_divisor, Eigen::RowVectorXd* logits) const {
  if (batch.empty()) return 0.0;
  const int hdim = arch_.hidden;
  const int in = arch_.input_size;
  const auto steps = static_cast<int>(batch.front()->rows());
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (steps == 0) throw Error(ErrorCode::kEmptySequence, "sequence has no steps");
  for (const RowMatrix* s : batch) {
    if (s->rows() != steps) throw Error(ErrorCode::kShapeMismatch, "batch sequences differ in length");
    if (s->cols() != in) {
      throw Error(ErrorCode::kShapeMismatch, "sequence feature width " + std::to_string(s->cols()) +
                                                 " != " + std::to_string(in));
    }
  }
  const bool training = !grad.empty();

  // Reused across calls; large per-call allocations dominated runtime.
  thread_local DirectionTrace trace[2];
  thread_local Mat da;
  for (int d = 0; d < 2; ++d) {
    Eigen::Map<const RowMat> wx(params_.data() + dir_[d].wx, 4 * hdim, in);
    Eigen::Map<const RowMat> wh(params_.data() + dir_[d].wh, 4 * hdim, hdim);
    Eigen::Map<const Eigen::VectorXd> bias(params_.data() + dir_[d].b, 4 * hdim);
    auto& tr = trace[d];
    tr.x.resize(in, n * steps);
    for (int s = 0; s < steps; ++s) {
      const int t = d == 0 ? s : steps - 1 - s;
      for (Eigen::Index b = 0; b < n; ++b) tr.x.col(s * n + b) = batch[b]->row(t).transpose();
    }
    tr.gates.noalias() = wx * tr.x;
    tr.gates.colwise() += bias;
    tr.c.resize(hdim, n * steps);
    tr.tanh_c.resize(hdim, n * steps);
    tr.h.resize(hdim, n * steps);
    for (int s = 0; s < steps; ++s) {
      auto a = tr.gates.middleCols(s * n, n);
      if (s > 0) a.noalias() += wh * tr.h.middleCols((s - 1) * n, n);
      a.topRows(2 * hdim) = (1.0 + (-a.topRows(2 * hdim).array()).exp()).inverse().matrix();
      a.middleRows(2 * hdim, hdim) = a.middleRows(2 * hdim, hdim).array().tanh().matrix();
      a.bottomRows(hdim) = (1.0 + (-a.bottomRows(hdim).array()).exp()).inverse().matrix();
      auto c = tr.c.middleCols(s * n, n);
      c = (a.topRows(hdim).array() * a.middleRows(2 * hdim, hdim).array()).matrix();
      if (s > 0) c.array() += a.middleRows(hdim, hdim).array() * tr.c.middleCols((s - 1) * n, n).array();
      tr.tanh_c.middleCols(s * n, n) = c.array().tanh().matrix();
      tr.h.middleCols(s * n, n) = (a.bottomRows(hdim).array() * tr.tanh_c.middleCols(s * n, n).array()).matrix();
    }
  }

  Mat z(2 * hdim, n);
  z.topRows(hdim) = trace[0].h.rightCols(n);
  z.bottomRows(hdim) = trace[1].h.rightCols(n);
  Mat mask;
  if (dropout_rng) {
    mask.resize(z.rows(), z.cols());
    ApplyDropout<double>({z.data(), static_cast<std::size_t>(z.size())}, arch_.dropout, *dropout_rng,
                         {mask.data(), static_cast<std::size_t>(mask.size())});
  }
  Eigen::Map<const RowMat> w1(params_.data() + w1_, arch_.dense, 2 * hdim);
  Eigen::Map<const Eigen::VectorXd> b1(params_.data() + b1_, arch_.dense);
  Eigen::Map<const Eigen::RowVectorXd> w2(params_.data() + w2_, arch_.dense);
  Mat u = w1 * z;
  u.colwise() += b1;
  const Mat r = u.cwiseMax(0.0);
  const Eigen::RowVectorXd logit = (w2 * r).array() + params_[b2_];
  if (logits) *logits = logit;
  if (labels.empty()) return 0.0;

  double total_loss = 0.0;
  Eigen::RowVectorXd d_logit(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const LossAndGrad lg = loss_kind == LstmLoss::kMeanAbsoluteError ? MaeOfSigmoid(logit(b), labels[b])
                                                                     : BceOfSigmoid(logit(b), labels[b]);
    total_loss += lg.loss;
    d_logit(b) = lg.grad / batch_divisor;
  }
  if (!training) return total_loss;

  Eigen::Map<Eigen::RowVectorXd>(grad.data() + w2_, arch_.dense) += d_logit * r.transpose();
  grad[b2_] += d_logit.sum();
  Mat du = w2.transpose() * d_logit;
  du = (u.array() > 0.0).select(du, 0.0);
  Eigen::Map<RowMat>(grad.data() + w1_, arch_.dense, 2 * hdim) += du * z.transpose();
  Eigen::Map<Eigen::VectorXd>(grad.data() + b1_, arch_.dense) += du.rowwise().sum();
  Mat dz = w1.transpose() * du;
  if (dropout_rng) dz = (dz.array() * mask.array()).matrix();

  for (int d = 0; d < 2; ++d) {
    Eigen::Map<const RowMat> wh(params_.data() + dir_[d].wh, 4 * hdim, hdim);
    Eigen::Map<RowMat> g_wx(grad.data() + dir_[d].wx, 4 * hdim, in);
    Eigen::Map<RowMat> g_wh(grad.data() + dir_[d].wh, 4 * hdim, hdim);
    Eigen::Map<Eigen::VectorXd> g_b(grad.data() + dir_[d].b, 4 * hdim);
    const auto& tr = trace[d];
    da.resize(4 * hdim, n * steps);
    Mat dh = dz.middleRows(d * hdim, hdim);
    Mat dc = Mat::Zero(hdim, n);
    for (int s = steps - 1; s >= 0; --s) {
      const auto a = tr.gates.middleCols(s * n, n);
      const auto gi = a.topRows(hdim).array();
      const auto gf = a.middleRows(hdim, hdim).array();
      const auto gg = a.middleRows(2 * hdim, hdim).array();
      const auto go = a.bottomRows(hdim).array();
      const auto tc = tr.tanh_c.middleCols(s * n, n).array();
      auto step = da.middleCols(s * n, n);
      step.bottomRows(hdim) = (dh.array() * tc * go * (1.0 - go)).matrix();
      dc.array() += dh.array() * go * (1.0 - tc * tc);
      step.topRows(hdim) = (dc.array() * gg * gi * (1.0 - gi)).matrix();
      if (s > 0) {
        step.middleRows(hdim, hdim) =
            (dc.array() * tr.c.middleCols((s - 1) * n, n).array() * gf * (1.0 - gf)).matrix();
      } else {
        step.middleRows(hdim, hdim).setZero();
      }
      step.middleRows(2 * hdim, hdim) = (dc.array() * gi * (1.0 - gg * gg)).matrix();
      dh.noalias() = wh.transpose() * step;
      dc.array() *= gf;
    }
    g_wx.noalias() += da * tr.x.transpose();
    g_b += da.rowwise().sum();
    if (steps > 1) {
      g_wh.noalias() += da.rightCols(n * (steps - 1)) * tr.h.leftCols(n * (steps - 1)).transpose();
    }
  }
  return total_loss;
}

double BiLstm::Predict(const RowMatrix& sequence) const {
  if (sequence.rows() == 0) throw Error(ErrorCode::kEmptySequence, "sequence has no steps");
  const RowMatrix* one[] = {&sequence};
  Eigen::RowVectorXd logit;
  Evaluate(one, {}, LstmLoss::kMeanAbsoluteError, {}, nullptr, 1.0, &logit);
  return Sigmoid(logit(0));
}

BiLstm BiLstm::Mirrored() const {
  BiLstm out = *this;
  const std::size_t block = dir_[0].b + 4 * static_cast<std::size_t>(arch_.hidden) - dir_[0].wx;
  std::swap_ranges(out.params_.begin() + static_cast<std::ptrdiff_t>(dir_[0].wx),
                   out.params_.begin() + static_cast<std::ptrdiff_t>(dir_[0].wx + block),
                   out.params_.begin() + static_cast<std::ptrdiff_t>(dir_[1].wx));
  const int hdim = arch_.hidden;
  for (int row = 0; row < arch_.dense; ++row) {
    double* r = out.params_.data() + w1_ + static_cast<std::size_t>(row) * 2 * hdim;
    std::swap_ranges(r, r + hdim, r + hdim);
  }
  return out;
}

RowMatrix VectorAsSequence(const Vector& v) {
  RowMatrix seq(v.size(), 1);
  seq.col(0) = v;
  return seq;
}

RowMatrix ReverseSequence(const RowMatrix& sequence) { return sequence.colwise().reverse(); }

LstmModel TrainLstm(std::span<const RowMatrix> sequences, std::span<const int> labels,
                    const LstmArchitecture& arch, const LstmTrainOptions& options,
                    std::vector<double>* loss_history) {
  if (sequences.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "sequences and labels differ in length");
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kBadLabel, "labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(ErrorCode::kSingleClassData, "LSTM needs both classes");
  for (const auto& s : sequences) {
    if (s.rows() == 0) throw Error(ErrorCode::kEmptySequence, "training sequence has no steps");
  }
  if (options.epochs < 0 || options.batch_size < 1) throw Error(ErrorCode::kConfigError, "bad epochs/batch size");

  LstmModel model;
  model.net = BiLstm(arch);
  Rng init_rng(MixSeed(options.seed, 11));
  Rng dropout_rng(MixSeed(options.seed, 12));
  Rng order_rng(MixSeed(options.seed, 13));
  model.net.InitGlorot(init_rng);
  AdamState adam(model.net.params().size(), options.adam);
  AlignedVector<double> grad(model.net.params().size());

  std::vector<std::size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (loss_history) loss_history->clear();
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    order_rng.Shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      // Sequences of equal length are stepped together; groups keep their
      // first-appearance order.
      std::map<Eigen::Index, std::vector<std::size_t>> by_length;
      std::vector<Eigen::Index> length_order;
      for (std::size_t k = start; k < end; ++k) {
        const Eigen::Index len = sequences[order[k]].rows();
        if (!by_length.count(len)) length_order.push_back(len);
        by_length[len].push_back(order[k]);
      }
      double batch_loss = 0.0;
      for (Eigen::Index len : length_order) {
        std::vector<const RowMatrix*> group;
        std::vector<int> group_labels;
        for (std::size_t idx : by_length[len]) {
          group.push_back(&sequences[idx]);
          group_labels.push_back(labels[idx]);
        }
        batch_loss += model.net.AccumulateGradient(group, group_labels, options.loss, grad, &dropout_rng,
                                                   static_cast<double>(end - start));
      }
      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::kNonFiniteLoss, "LSTM loss diverged at epoch " + std::to_string(epoch));
      }
      adam.Step<double>(model.net.params(), grad);
      epoch_loss += batch_loss;
    }
    if (loss_history) loss_history->push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return model;
}

}  // namespace voxscreen
