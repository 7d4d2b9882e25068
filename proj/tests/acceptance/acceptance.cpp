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

// Acceptance gates. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "voxscreen/activations.hpp"
#include "voxscreen/audio_io.hpp"
#include "voxscreen/cnn.hpp"
#include "voxscreen/datasets.hpp"
#include "voxscreen/dsp.hpp"
#include "voxscreen/encoder.hpp"
#include "voxscreen/evaluation.hpp"
#include "voxscreen/gradcheck.hpp"
#include "voxscreen/logreg.hpp"
#include "voxscreen/losses.hpp"
#include "voxscreen/lstm.hpp"
#include "voxscreen/model.hpp"
#include "voxscreen/rng.hpp"
#include "voxscreen/svm.hpp"

using namespace voxscreen;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void Note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

Outcome DspOracles() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(101);
  double worst = 0.0, worst_parseval = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::size_t{64} << rng.Index(7);  // 64 .. 4096
    std::vector<double> frame(n);
    for (double& v : frame) v = rng.Uniform(-1.0, 1.0);
    const std::vector<double> flat(n, 1.0);
    const auto fast = PowerSpectrum(frame, flat);
    const auto slow = oracle::NaiveDftPower(frame);
    const double peak = *std::max_element(slow.begin(), slow.end());
    for (std::size_t k = 0; k < slow.size(); ++k) {
      worst = std::max(worst, std::abs(fast[k] - slow[k]) / std::max(slow[k], 1e-12 * peak));
    }
    double energy = 0.0;
    for (double v : frame) energy += v * v;
    double full = fast.front() + fast.back();
    for (std::size_t k = 1; k + 1 < fast.size(); ++k) full += 2.0 * fast[k];
    worst_parseval = std::max(worst_parseval, std::abs(energy - full / n) / energy);
  }
  const double t = Seconds(start);
  o.Require(worst < 1e-6, "fft vs dft " + Fmt("%.2e", worst));
  o.Require(worst_parseval < 1e-6, "parseval " + Fmt("%.2e", worst_parseval));
  o.Require(t < 30.0, "runtime " + Fmt("%.1f s", t));
  o.Note("max rel err " + Fmt("%.2e", worst) + ", parseval " + Fmt("%.2e", worst_parseval) + ", " +
         Fmt("%.2f s", t));
  return o;
}

Outcome GoldenMfcc(const std::string& golden_dir) {
  Outcome o;
  const AudioClip clip = SynthClipAudio(0, 7, 1.0);
  std::ifstream in(golden_dir + "/synth_seed7_class0_mfcc_mean.txt");
  std::vector<double> golden;
  for (double v; in >> v;) golden.push_back(v);
  if (golden.size() != 40) {
    o.Require(false, "golden vector missing or not 40 values");
    return o;
  }
  const AudioClip stored = LoadWavFile(golden_dir + "/synth_seed7_class0.wav");
  bool same_audio = stored.samples.size() == clip.samples.size();
  for (std::size_t i = 0; same_audio && i < clip.samples.size(); ++i) {
    same_audio = stored.samples[i] == static_cast<double>(static_cast<float>(clip.samples[i]));
  }
  o.Require(same_audio, "synthesized clip differs from the checked-in wav");
  const Vector mean = MfccMeanVector(ComputeMfcc(stored, FrameParams{}, MelParams{})).values;
  double worst = 0.0;
  for (int j = 0; j < 40; ++j) worst = std::max(worst, std::abs(mean(j) - golden[j]));
  o.Require(worst <= 1e-5, "max abs diff " + Fmt("%.2e", worst));
  o.Note("max abs diff " + Fmt("%.2e", worst));
  return o;
}

double Central(const std::function<double(double)>& f, double x) {
  const double h = 1e-5;
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double RelErr(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-6}); }

double CnnGradError(bool gray) {
  Rng rng(gray ? 202 : 201);
  CnnArchitecture a;
  a.height = a.width = 8;
  a.filters1 = 3;
  a.filters2 = 4;
  ConvNet<double> net(a);
  net.InitGlorot(rng);
  for (double& p : net.params()) p += 0.05 * rng.Normal();
  std::vector<std::vector<double>> images;
  for (int i = 0; i < 3; ++i) {
    std::vector<double> img(a.input_size());
    for (std::size_t p = 0; p < img.size(); p += a.channels) {
      const double v = rng.Uniform();
      for (int c = 0; c < a.channels; ++c) img[p + c] = gray ? v : rng.Uniform();
    }
    images.push_back(std::move(img));
  }
  const int labels[] = {1, 0, 1};
  ConvNet<double>::Workspace ws;
  std::vector<double> analytic(net.params().size(), 0.0);
  for (int i = 0; i < 3; ++i) net.AccumulateGradient(images[i], labels[i], analytic, nullptr, ws);
  auto loss = [&](std::span<const double> p) {
    ConvNet<double> probe = net;
    std::copy(p.begin(), p.end(), probe.params().begin());
    std::vector<double> scratch(p.size(), 0.0);
    ConvNet<double>::Workspace w;
    double total = 0.0;
    for (int i = 0; i < 3; ++i) total += probe.AccumulateGradient(images[i], labels[i], scratch, nullptr, w);
    return total;
  };
  const auto params = net.params();
  return CheckGradient(loss, std::vector<double>(params.begin(), params.end()), analytic).max_relative_error;
}

double LstmGradError(LstmLoss kind) {
  Rng rng(203);
  LstmArchitecture a;
  a.input_size = 2;
  a.hidden = 3;
  a.dense = 4;
  BiLstm net(a);
  net.InitGlorot(rng);
  for (double& p : net.params()) p += 0.1 * rng.Normal();
  std::vector<RowMatrix> seqs;
  for (int i = 0; i < 3; ++i) {
    RowMatrix s(5, 2);
    for (Eigen::Index k = 0; k < s.size(); ++k) s.data()[k] = rng.Normal();
    seqs.push_back(s);
  }
  const RowMatrix* batch[] = {&seqs[0], &seqs[1], &seqs[2]};
  const int labels[] = {1, 0, 1};
  std::vector<double> analytic(net.params().size(), 0.0);
  net.AccumulateGradient(batch, labels, kind, analytic, nullptr, 3.0);
  auto loss = [&](std::span<const double> p) {
    BiLstm probe = net;
    std::copy(p.begin(), p.end(), probe.params().begin());
    std::vector<double> scratch(p.size(), 0.0);
    return probe.AccumulateGradient(batch, labels, kind, scratch, nullptr, 3.0) / 3.0;
  };
  const auto params = net.params();
  return CheckGradient(loss, std::vector<double>(params.begin(), params.end()), analytic).max_relative_error;
}

double LogRegGradError() {
  Rng rng(204);
  std::vector<Vector> rows;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    rows.push_back(Vector::NullaryExpr(3, [&] { return rng.Normal(); }));
    labels.push_back(i % 2);
  }
  LogRegModel m;
  m.weights = Vector::NullaryExpr(3, [&] { return rng.Normal(); });
  m.bias = 0.1;
  Vector gw;
  double gb = 0.0;
  LogRegGradient(m, rows, labels, &gw, &gb);
  const std::vector<double> params = {m.weights(0), m.weights(1), m.weights(2), m.bias};
  const std::vector<double> analytic = {gw(0), gw(1), gw(2), gb};
  auto loss = [&](std::span<const double> p) {
    LogRegModel probe;
    probe.weights = Vector(3);
    probe.weights << p[0], p[1], p[2];
    probe.bias = p[3];
    return LogRegLoss(probe, rows, labels);
  };
  return CheckGradient(loss, params, analytic).max_relative_error;
}

Outcome GradientChecks() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(205);
  double act = 0.0, loss = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.Uniform(-6.0, 6.0);
    const int y = i % 2;
    act = std::max(act, RelErr(SigmoidGrad(x), Central([](double v) { return Sigmoid(v); }, x)));
    act = std::max(act, RelErr(GeluGrad(x), Central(Gelu, x)));
    if (std::abs(x) > 1e-3) act = std::max(act, RelErr(ReluGrad(x), Central([](double v) { return Relu(v); }, x)));
    loss = std::max(loss, RelErr(MaeOfSigmoid(x, y).grad, Central([&](double v) { return MaeOfSigmoid(v, y).loss; }, x)));
    loss = std::max(loss, RelErr(BceOfSigmoid(x, y).grad, Central([&](double v) { return BceOfSigmoid(v, y).loss; }, x)));
    const double z1 = rng.Uniform(-5.0, 5.0);
    std::array<double, 2> g;
    SoftmaxCrossEntropy2(x, z1, y, &g);
    std::array<double, 2>* none = nullptr;
    loss = std::max(loss, RelErr(g[0], Central([&](double v) { return SoftmaxCrossEntropy2(v, z1, y, none); }, x)));
    loss = std::max(loss, RelErr(g[1], Central([&](double v) { return SoftmaxCrossEntropy2(x, v, y, none); }, z1)));
  }
  const std::pair<const char*, double> checks[] = {
      {"activations", act},
      {"losses", loss},
      {"logreg", LogRegGradError()},
      {"cnn", CnnGradError(false)},
      {"cnn gray", CnnGradError(true)},
      {"lstm mae", LstmGradError(LstmLoss::kMeanAbsoluteError)},
      {"lstm bce", LstmGradError(LstmLoss::kBinaryCrossEntropy)},
  };
  double worst = 0.0;
  for (const auto& [name, err] : checks) {
    o.Require(err < 1e-4, std::string(name) + " " + Fmt("%.2e", err));
    worst = std::max(worst, err);
  }
  const double t = Seconds(start);
  o.Require(t < 60.0, "runtime " + Fmt("%.1f s", t));
  o.Note("worst rel err " + Fmt("%.2e", worst) + ", " + Fmt("%.2f s", t));
  return o;
}

Outcome AucEquivalence() {
  Outcome o;
  Rng rng(301);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.Index(199));
    // Every third set draws scores from five levels to force ties.
    const bool ties = trial % 3 == 0;
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      y.push_back(i < 2 ? i : static_cast<int>(rng.Index(2)));
      s.push_back(ties ? static_cast<double>(rng.Index(5)) / 4.0 : rng.Uniform());
    }
    worst = std::max(worst, std::abs(RocAuc(s, y).auc - oracle::PairwiseAuc(s, y)));
  }
  o.Require(worst <= 1e-12, "max diff " + Fmt("%.2e", worst));
  o.Note("max diff " + Fmt("%.2e", worst));
  return o;
}

bool BalancedFolds(int n_pos, int n_neg, int k, std::uint64_t seed) {
  std::vector<int> y(static_cast<std::size_t>(n_pos), 1);
  y.insert(y.end(), static_cast<std::size_t>(n_neg), 0);
  const FoldPlan plan = StratifiedFolds(y, k, seed);
  std::vector<int> pos(k, 0), neg(k, 0);
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? pos : neg)[plan.assignment[i]]++;
  for (int f = 0; f < k; ++f) {
    if (pos[f] != n_pos / k && pos[f] != (n_pos + k - 1) / k) return false;
    if (neg[f] != n_neg / k && neg[f] != (n_neg + k - 1) / k) return false;
  }
  return true;
}

Outcome Stratification() {
  Outcome o;
  Rng rng(401);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.Index(19));
    const int n_pos = k + static_cast<int>(rng.Index(300));
    const int n_neg = k + static_cast<int>(rng.Index(600));
    bad += !BalancedFolds(n_pos, n_neg, k, rng.NextU64());
  }
  o.Require(bad == 0, std::to_string(bad) + " of 1000 random plans unbalanced");
  o.Require(BalancedFolds(308, 585, 10, 1), "308/585 k=10 unbalanced");
  o.Note("1000 random plans and 308/585 k=10 balanced to within one");
  return o;
}

Outcome EncoderGeometry() {
  Outcome o;
  const EncoderConfig cfg = EncoderConfig::Default();
  o.Require(EncoderOutputLength(16000, cfg) == 49, "length(16000) != 49");
  const double frame_ms = 1000.0 * cfg.stride_product() / kCanonicalSampleRate;
  o.Require(frame_ms == 20.0, "framerate " + Fmt("%.3f ms", frame_ms));
  const EncoderWeights w = EncoderWeights::Seeded(cfg, 1);
  Rng rng(501);
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    AudioClip clip;
    clip.samples.resize(400 + rng.Index(16000));
    for (double& s : clip.samples) s = rng.Uniform(-1.0, 1.0);
    const EncoderFeatures f = ApplyEncoder(clip, cfg, w);
    mismatches += f.values.rows() != oracle::EncoderLength(static_cast<long long>(clip.samples.size())) ||
                  f.values.cols() != 512;
  }
  o.Require(mismatches == 0, std::to_string(mismatches) + " of 20 shapes disagree with the oracle");
  o.Note("49 frames per second, 20 ms, 20 random lengths agree");
  return o;
}

struct Corpus {
  std::vector<AudioClip> clips;
  std::vector<int> labels;
};

Corpus LoadSyntheticCorpus(const fs::path& dir) {
  GenerateSyntheticCorpus(100, 100, 1, dir);
  Corpus c;
  for (const auto& e : LoadManifest(dir / "manifest.csv")) {
    c.clips.push_back(LoadClip(dir / e.clip_path));
    c.labels.push_back(e.label);
  }
  return c;
}

std::vector<ExampleFeatures> Extract(const Corpus& c, FeatureKind kind) {
  std::vector<ExampleFeatures> out;
  for (const auto& clip : c.clips) out.push_back(ExtractFeatures(clip, kind, ExtractionConfig{}));
  return out;
}

struct Gate {
  const char* name;
  ModelKind model;
  FeatureKind feature;
  double min_auc;
};

constexpr Gate kGates[] = {
    {"lr", ModelKind::kLogReg, FeatureKind::kMfccVector, 0.95},
    {"svm", ModelKind::kSvm, FeatureKind::kMfccVector, 0.90},
    {"lstm", ModelKind::kLstm, FeatureKind::kMfccVector, 0.85},
    {"cnn", ModelKind::kCnn, FeatureKind::kMelspecImage, 0.90},
};

// One full pass: corpus generation, extraction and the four cross-validations.
std::vector<std::string> RunGates(const fs::path& dir, int jobs, std::vector<double>* aucs,
                                  std::vector<double>* times) {
  fs::remove_all(dir);
  const Corpus corpus = LoadSyntheticCorpus(dir);
  std::vector<std::string> reports;
  for (const Gate& g : kGates) {
    const auto start = Clock::now();
    ModelRecipe recipe;
    recipe.model = g.model;
    recipe.feature = g.feature;
    CvOptions cv;
    cv.k = 10;
    cv.seed = 1;
    cv.jobs = jobs;
    const EvaluationReport r = CrossValidate(Extract(corpus, g.feature), corpus.labels, recipe, cv);
    reports.push_back(ReportToJson(r).dump());
    if (aucs) aucs->push_back(r.pooled_roc.auc);
    if (times) times->push_back(Seconds(start));
  }
  return reports;
}

Outcome EndToEnd(const fs::path& scratch, int jobs) {
  Outcome o;
  std::vector<double> aucs, times;
  const auto start = Clock::now();
  const auto first = RunGates(scratch / "e2e_a", jobs, &aucs, &times);
  const double total = Seconds(start);
  const auto rerun_start = Clock::now();
  const auto second = RunGates(scratch / "e2e_b", jobs, nullptr, nullptr);
  const double rerun = Seconds(rerun_start);
  std::string summary;
  for (std::size_t i = 0; i < std::size(kGates); ++i) {
    const Gate& g = kGates[i];
    o.Require(aucs[i] >= g.min_auc, std::string(g.name) + " auc " + Fmt("%.4f", aucs[i]) + " < " +
                                        Fmt("%.2f", g.min_auc));
    o.Require(first[i] == second[i], std::string(g.name) + " report differs between runs");
    summary += std::string(summary.empty() ? "" : ", ") + g.name + " auc " + Fmt("%.4f", aucs[i]) + " (" +
               Fmt("%.0f s", times[i]) + ")";
  }
  o.Require(total < 600.0, "gate pass took " + Fmt("%.0f s", total) + " > 600 s with " + std::to_string(jobs) +
                               " worker(s)");
  o.Note(summary + "; pass " + Fmt("%.0f s", total) + ", determinism rerun " + Fmt("%.0f s", rerun) +
         " identical, jobs " + std::to_string(jobs));
  fs::remove_all(scratch / "e2e_a");
  fs::remove_all(scratch / "e2e_b");
  return o;
}

std::vector<ExampleFeatures> CanaryColumns(const std::vector<int>& labels, bool copy_label, Rng& rng) {
  std::vector<ExampleFeatures> out;
  for (int y : labels) {
    ExampleFeatures f;
    f.vector = Vector(2);
    f.vector << rng.Normal(), copy_label ? static_cast<double>(y) : rng.Normal();
    out.push_back(std::move(f));
  }
  return out;
}

Outcome LeakageCanary() {
  Outcome o;
  std::vector<int> y;
  for (int i = 0; i < 400; ++i) y.push_back(i % 2);
  ModelRecipe recipe;
  CvOptions cv;
  cv.k = 10;
  Rng rng(801);
  cv.seed = 1;
  const double label_auc = CrossValidate(CanaryColumns(y, true, rng), y, recipe, cv).pooled_roc.auc;
  o.Require(label_auc >= 0.99, "label canary auc " + Fmt("%.4f", label_auc));
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng noise(900 + seed);
    cv.seed = seed;
    const double auc = CrossValidate(CanaryColumns(y, false, noise), y, recipe, cv).pooled_roc.auc;
    lo = std::min(lo, auc);
    hi = std::max(hi, auc);
  }
  o.Require(lo >= 0.4 && hi <= 0.6, "noise auc range [" + Fmt("%.3f", lo) + ", " + Fmt("%.3f", hi) + "]");
  o.Note("label auc " + Fmt("%.4f", label_auc) + ", noise auc in [" + Fmt("%.3f", lo) + ", " + Fmt("%.3f", hi) +
         "] over 10 seeds");
  return o;
}

Outcome SvmKkt(const fs::path& scratch) {
  Outcome o;
  const fs::path dir = scratch / "kkt";
  fs::remove_all(dir);
  const Corpus corpus = LoadSyntheticCorpus(dir);
  std::vector<Vector> rows;
  for (const auto& f : Extract(corpus, FeatureKind::kMfccVector)) rows.push_back(f.vector);
  const Standardizer s = Standardizer::Fit(rows);
  for (auto& r : rows) r = s.Apply(r);
  const SvmOptions opts;
  const SvmSolution sol = TrainSvmSmo(rows, corpus.labels, opts);
  const KktAudit audit = AuditKkt(rows, corpus.labels, sol.alphas, sol.model.bias, opts.gamma, opts.c, opts.tol);
  o.Require(sol.model.converged, "smo did not converge");
  o.Require(audit.violations == 0, std::to_string(audit.violations) + " kkt violations");
  o.Require(std::abs(audit.sum_alpha_y) <= 1e-9, "sum alpha*y " + Fmt("%.2e", audit.sum_alpha_y));
  o.Note(std::to_string(sol.model.support_vectors.rows()) + " support vectors, worst violation " +
         Fmt("%.2e", audit.worst_violation) + ", sum alpha*y " + Fmt("%.2e", audit.sum_alpha_y));
  fs::remove_all(dir);
  return o;
}

Outcome CohortArithmetic() {
  Outcome o;
  std::vector<LabeledExample> rows;
  for (int i = 0; i < 308; ++i) {
    LabeledExample e;
    e.clip_path = "pos_" + std::to_string(i) + ".wav";
    e.label = 1;
    e.test_delay_days = i < 141 ? i % 15 : 15 + i % 40;
    rows.push_back(e);
  }
  for (int i = 0; i < 585; ++i) {
    LabeledExample e;
    e.clip_path = "neg_" + std::to_string(i) + ".wav";
    if (i < 216) e.symptoms = {std::string(kColdSymptoms[i % 4])};
    else if (i % 2) e.symptoms = {"headache"};
    rows.push_back(e);
  }
  const auto parsed = ParseManifest(SerializeManifest(rows));
  const auto recent = ApplyCohort(parsed, CohortFilter::PositivesWithinDays(14));
  int recent_pos = 0;
  for (const auto& e : recent.examples) recent_pos += e.label;
  const auto cold = ApplyCohort(parsed, CohortFilter::CovidVsColdSymptomatic());
  int cold_pos = 0;
  for (const auto& e : cold.examples) cold_pos += e.label;
  o.Require(recent_pos == 141, "within 14 days kept " + std::to_string(recent_pos) + " positives");
  o.Require(cold.examples.size() == 524 && cold_pos == 308,
            "cold cohort " + std::to_string(cold_pos) + " + " + std::to_string(cold.examples.size() - cold_pos));
  o.Note("141 recent positives; cold cohort " + std::to_string(cold_pos) + " + " +
         std::to_string(cold.examples.size() - cold_pos) + " = " + std::to_string(cold.examples.size()));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxscreen acceptance gates"};
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string golden = VOXSCREEN_GOLDEN_DIR;
  std::string scratch = (fs::temp_directory_path() / "voxscreen_acceptance").string();
  std::vector<int> only;
  app.add_option("--jobs", jobs, "Folds trained concurrently")->check(CLI::PositiveNumber);
  app.add_option("--golden", golden, "Golden data directory");
  app.add_option("--scratch", scratch, "Scratch directory");
  app.add_option("--only", only, "Criteria to run")->delimiter(',')->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::function<Outcome()> criteria[] = {
      DspOracles,
      [&] { return GoldenMfcc(golden); },
      GradientChecks,
      AucEquivalence,
      Stratification,
      EncoderGeometry,
      [&] { return EndToEnd(scratch, jobs); },
      LeakageCanary,
      [&] { return SvmKkt(scratch); },
      CohortArithmetic,
  };
  fs::create_directories(scratch);
  bool all = true;
  for (int i = 0; i < 10; ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), i + 1) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    all = all && o.pass;
    std::printf("criterion %2d: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch);
  return all ? 0 : 1;
}
