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

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>
#include <string>
#include <vector>

#include "voxscreen/audio_io.hpp"
#include "voxscreen/cli.hpp"
#include "voxscreen/datasets.hpp"
#include "voxscreen/dsp.hpp"
#include "voxscreen/encoder.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/evaluation.hpp"
#include "voxscreen/model.hpp"
#include "voxscreen/render.hpp"

namespace py = pybind11;
using namespace voxscreen;

namespace {

AudioClip ClipFrom(const std::vector<double>& samples, int sample_rate) {
  AudioClip clip;
  clip.samples = samples;
  clip.sample_rate = sample_rate;
  return clip;
}

FrameParams Frames(int frame_length, int hop_length) {
  FrameParams p;
  p.frame_length = frame_length;
  p.hop_length = hop_length;
  return p;
}

MelParams Mels(int n_mels, int n_mfcc) {
  MelParams m;
  m.n_mels = n_mels;
  m.n_mfcc = n_mfcc;
  return m;
}

py::array_t<float> ImageArray(const FeatureImage& img) {
  py::array_t<float> out({img.height, img.width, kImageChannels});
  std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
  return out;
}

py::dict ExampleDict(const LabeledExample& e) {
  py::dict d;
  d["path"] = e.clip_path;
  d["label"] = e.label;
  d["symptoms"] = e.symptoms;
  d["test_delay_days"] = e.test_delay_days;
  d["hospitalized"] = e.hospitalized;
  return d;
}

py::object MaybeFloat(const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::none(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core bindings for the voxscreen toolkit";
  py::register_exception<Error>(m, "VoxscreenError", PyExc_ValueError);

  m.attr("SAMPLE_RATE") = kCanonicalSampleRate;

  m.def(
      "synth_clip",
      [](int class_label, std::uint64_t seed, double duration) {
        return SynthClipAudio(class_label, seed, duration).samples;
      },
      py::arg("class_label"), py::arg("seed"), py::arg("duration") = 1.0,
      "Synthetic 16 kHz clip for class 0 or 1.");

  m.def(
      "load_wav",
      [](const std::filesystem::path& path) {
        const AudioClip clip = LoadWavFile(path);
        return py::make_tuple(clip.samples, clip.sample_rate);
      },
      py::arg("path"), "Decode a WAV file to (samples, sample_rate).");

  m.def(
      "prepare",
      [](const std::vector<double>& samples, int sample_rate) {
        return PrepareClip(ClipFrom(samples, sample_rate)).samples;
      },
      py::arg("samples"), py::arg("sample_rate"), "Resample to 16 kHz and peak-normalize.");

  m.def("hz_to_mel", &HzToMel, py::arg("hz"));
  m.def("mel_to_hz", &MelToHz, py::arg("mel"));

  m.def(
      "mfcc",
      [](const std::vector<double>& samples, int sample_rate, int frame_length, int hop_length, int n_mels,
         int n_mfcc) {
        return ComputeMfcc(ClipFrom(samples, sample_rate), Frames(frame_length, hop_length), Mels(n_mels, n_mfcc))
            .values;
      },
      py::arg("samples"), py::arg("sample_rate") = kCanonicalSampleRate, py::arg("frame_length") = 2048,
      py::arg("hop_length") = 512, py::arg("n_mels") = 64, py::arg("n_mfcc") = 40,
      "Frames x coefficients MFCC matrix.");

  m.def(
      "mfcc_mean",
      [](const std::vector<double>& samples, int sample_rate) {
        return MfccMeanVector(ComputeMfcc(ClipFrom(samples, sample_rate), FrameParams{}, MelParams{})).values;
      },
      py::arg("samples"), py::arg("sample_rate") = kCanonicalSampleRate, "Mean MFCC vector over frames.");

  m.def(
      "mel_spectrogram",
      [](const std::vector<double>& samples, int sample_rate, int frame_length, int hop_length, int n_mels) {
        return ComputeMelSpectrogram(ClipFrom(samples, sample_rate), Frames(frame_length, hop_length),
                                     Mels(n_mels, 40))
            .values;
      },
      py::arg("samples"), py::arg("sample_rate") = kCanonicalSampleRate, py::arg("frame_length") = 2048,
      py::arg("hop_length") = 512, py::arg("n_mels") = 64, "Frames x mel bands of natural-log power.");

  m.def(
      "render_image",
      [](const RowMatrix& frames_by_coeffs) {
        return ImageArray(RenderImage(frames_by_coeffs, ImageSource::kMelSpectrogram));
      },
      py::arg("matrix"), "150x150x3 float image of a frames x coefficients matrix.");

  m.def(
      "encoder_output_length", [](long long n) { return EncoderOutputLength(n, EncoderConfig::Default()); },
      py::arg("n_samples"));

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        const RocCurve roc = RocAuc(scores, labels);
        std::vector<std::tuple<double, double, double>> points;
        for (const auto& p : roc.points) points.emplace_back(p.threshold, p.fpr, p.tpr);
        return py::make_tuple(roc.auc, points);
      },
      py::arg("scores"), py::arg("labels"), "(auc, [(threshold, fpr, tpr), ...]).");

  m.def(
      "confusion",
      [](const std::vector<double>& scores, const std::vector<int>& labels, double threshold) {
        const ConfusionCounts c = ConfusionAtThreshold(scores, labels, threshold);
        py::dict d;
        d["tp"] = c.tp;
        d["fp"] = c.fp;
        d["tn"] = c.tn;
        d["fn"] = c.fn;
        return d;
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

  m.def(
      "metrics",
      [](long long tp, long long fp, long long tn, long long fn) {
        const Metrics mt = ComputeMetrics({tp, fp, tn, fn});
        py::dict d;
        for (const char* name : kMetricNames) d[name] = MaybeFloat(MetricByName(mt, name));
        return d;
      },
      py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"), "Five ratios; None where undefined.");

  m.def(
      "stratified_folds",
      [](const std::vector<int>& labels, int k, std::uint64_t seed) {
        return StratifiedFolds(labels, k, seed).assignment;
      },
      py::arg("labels"), py::arg("k"), py::arg("seed") = 0, "Fold index per example.");

  m.def(
      "parse_manifest",
      [](const std::string& text) {
        py::list out;
        for (const auto& e : ParseManifest(text)) out.append(ExampleDict(e));
        return out;
      },
      py::arg("text"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full = {"voxscreen"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a voxscreen subcommand; returns (exit_code, stdout, stderr).");
}
