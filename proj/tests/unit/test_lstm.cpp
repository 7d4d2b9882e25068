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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "voxscreen/error.hpp"
#include "voxscreen/gradcheck.hpp"
#include "voxscreen/lstm.hpp"

using namespace voxscreen;

namespace {

LstmArchitecture SmallArch() {
  LstmArchitecture a;
  a.input_size = 2;
  a.hidden = 3;
  a.dense = 4;
  return a;
}

std::vector<RowMatrix> RandomSequences(int count, int steps, int width, Rng& rng) {
  std::vector<RowMatrix> out;
  for (int i = 0; i < count; ++i) {
    RowMatrix s(steps, width);
    for (Eigen::Index k = 0; k < s.size(); ++k) s.data()[k] = rng.Normal();
    out.push_back(s);
  }
  return out;
}

void CheckLstmGradient(LstmLoss loss) {
  Rng rng(21);
  BiLstm net(SmallArch());
  net.InitGlorot(rng);
  // Perturb biases away from zero so every parameter has a useful gradient.
  for (double& p : net.params()) p += 0.1 * rng.Normal();
  const auto seqs = RandomSequences(3, 5, 2, rng);
  const RowMatrix* batch[] = {&seqs[0], &seqs[1], &seqs[2]};
  const int labels[] = {1, 0, 1};

  std::vector<double> analytic(net.params().size(), 0.0);
  net.AccumulateGradient(batch, labels, loss, analytic, nullptr, 3.0);

  auto objective = [&](std::span<const double> p) {
    BiLstm probe = net;
    std::copy(p.begin(), p.end(), probe.params().begin());
    std::vector<double> scratch(p.size(), 0.0);
    return probe.AccumulateGradient(batch, labels, loss, scratch, nullptr, 3.0) / 3.0;
  };
  const auto params = net.params();
  const GradCheckResult r =
      CheckGradient(objective, std::vector<double>(params.begin(), params.end()), analytic);
  CHECK(r.checked == net.params().size());
  CHECK(r.max_relative_error < 1e-4);
}

}  // namespace

TEST_CASE("lstm parameter count matches layout") {
  const LstmArchitecture a = SmallArch();
  BiLstm net(a);
  // per direction 4H(D + H + 1), then dense(2H -> 4) and dense(4 -> 1)
  CHECK(net.params().size() == 2 * 12 * (2 + 3 + 1) + 4 * 6 + 4 + 4 + 1);
  CHECK(a.param_count() == net.params().size());
}

TEST_CASE("lstm bptt gradient matches finite differences (mae)") { CheckLstmGradient(LstmLoss::kMeanAbsoluteError); }

TEST_CASE("lstm bptt gradient matches finite differences (bce)") { CheckLstmGradient(LstmLoss::kBinaryCrossEntropy); }

TEST_CASE("lstm zero input with zero dense layers scores 0.5") {
  Rng rng(3);
  BiLstm net(LstmArchitecture{});
  net.InitGlorot(rng, /*zero_dense=*/true);
  const RowMatrix zeros = RowMatrix::Zero(40, 1);
  CHECK(net.Predict(zeros) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("lstm forget gate biases start at one") {
  Rng rng(4);
  LstmArchitecture a = SmallArch();
  BiLstm net(a);
  net.InitGlorot(rng);
  // First direction: Wx (4H x D) then Wh (4H x H) then b; forget block is b[H, 2H).
  const std::size_t b0 = 4 * a.hidden * a.input_size + 4 * a.hidden * a.hidden;
  for (int k = 0; k < a.hidden; ++k) {
    CHECK(net.params()[b0 + k] == 0.0);
    CHECK(net.params()[b0 + a.hidden + k] == 1.0);
  }
}

TEST_CASE("lstm mirrored weights on a reversed sequence give the same output") {
  Rng rng(5);
  BiLstm net(SmallArch());
  net.InitGlorot(rng);
  for (double& p : net.params()) p += 0.2 * rng.Normal();
  const auto seqs = RandomSequences(4, 7, 2, rng);
  const BiLstm mirrored = net.Mirrored();
  for (const auto& s : seqs) {
    CHECK(mirrored.Predict(ReverseSequence(s)) == doctest::Approx(net.Predict(s)).epsilon(1e-12));
  }
}

TEST_CASE("lstm learns ascending versus descending ramps") {
  Rng rng(6);
  std::vector<RowMatrix> seqs;
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) {
    const int label = i % 2;
    const double start = rng.Uniform(-1.0, 1.0);
    const double slope = rng.Uniform(0.02, 0.08) * (label ? 1.0 : -1.0);
    Vector v(20);
    for (int t = 0; t < 20; ++t) v(t) = start + slope * t + 0.01 * rng.Normal();
    seqs.push_back(VectorAsSequence(v));
    labels.push_back(label);
  }
  LstmTrainOptions opts;
  opts.seed = 9;
  std::vector<double> history;
  const LstmModel model = TrainLstm(seqs, labels, LstmArchitecture{}, opts, &history);
  int correct = 0;
  for (std::size_t i = 0; i < seqs.size(); ++i) correct += (model.Score(seqs[i]) >= 0.5) == (labels[i] == 1);
  CHECK(correct >= 95);
  REQUIRE(history.size() == 100);
  CHECK(history.back() <= history.front());
}

TEST_CASE("lstm training is deterministic per seed") {
  Rng rng(7);
  const auto seqs = RandomSequences(12, 6, 2, rng);
  const std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  LstmTrainOptions opts;
  opts.epochs = 3;
  opts.batch_size = 5;
  opts.seed = 11;
  const LstmModel a = TrainLstm(seqs, labels, SmallArch(), opts);
  const LstmModel b = TrainLstm(seqs, labels, SmallArch(), opts);
  CHECK(std::equal(a.net.params().begin(), a.net.params().end(), b.net.params().begin()));
}

TEST_CASE("lstm rejects empty sequences and single-class data") {
  const std::vector<RowMatrix> seqs = {RowMatrix(0, 1), RowMatrix::Ones(3, 1)};
  const std::vector<int> labels = {0, 1};
  CHECK_THROWS_AS(TrainLstm(seqs, labels, LstmArchitecture{}, {}), Error);
  try {
    TrainLstm(seqs, labels, LstmArchitecture{}, {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptySequence);
  }
  const std::vector<RowMatrix> ok = {RowMatrix::Ones(3, 1), RowMatrix::Ones(3, 1)};
  const std::vector<int> same = {1, 1};
  try {
    TrainLstm(ok, same, LstmArchitecture{}, {});
    FAIL("expected SingleClassData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingleClassData);
  }
  BiLstm net(LstmArchitecture{});
  CHECK_THROWS_AS(net.Predict(RowMatrix(0, 1)), Error);
}
