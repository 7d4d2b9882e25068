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

#include "voxscreen/encoder.hpp"

#include <cmath>

#include "voxscreen/activations.hpp"
#include "voxscreen/binary_io.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/rng.hpp"

namespace voxscreen {

EncoderConfig EncoderConfig::Default() {
  constexpr int kStrides[] = {5, 2, 2, 2, 2, 2, 2};
  constexpr int kKernels[] = {10, 3, 3, 3, 3, 2, 2};
  EncoderConfig cfg;
  int in = 1;
  for (int i = 0; i < 7; ++i) {
    cfg.layers.push_back({kKernels[i], kStrides[i], in, 512});
    in = 512;
  }
  return cfg;
}

int EncoderConfig::stride_product() const {
  int p = 1;
  for (const auto& l : layers) p *= l.stride;
  return p;
}

int EncoderConfig::receptive_field() const {
  // Walk back from a single output frame.
  int field = 1;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    field = (field - 1) * it->stride + it->kernel;
  }
  return field;
}

EncoderWeights EncoderWeights::Seeded(const EncoderConfig& cfg, std::uint64_t seed) {
  Rng rng(MixSeed(seed, 0xE2C0));
  EncoderWeights w;
  for (const auto& spec : cfg.layers) {
    const int fan_in = spec.in_channels * spec.kernel;
    const double bound = std::sqrt(6.0 / fan_in);
    EncoderLayerWeights layer;
    layer.spec = spec;
    layer.weight.resize(spec.out_channels, fan_in);
    for (int c = 0; c < fan_in; ++c) {
      for (int r = 0; r < spec.out_channels; ++r) {
        layer.weight(r, c) = static_cast<float>(rng.Uniform(-bound, bound));
      }
    }
    layer.bias = Eigen::VectorXf::Zero(spec.out_channels);
    w.layers.push_back(std::move(layer));
  }
  return w;
}

EncoderWeights EncoderWeights::Zero(const EncoderConfig& cfg) {
  EncoderWeights w;
  for (const auto& spec : cfg.layers) {
    EncoderLayerWeights layer;
    layer.spec = spec;
    layer.weight = Eigen::MatrixXf::Zero(spec.out_channels, spec.in_channels * spec.kernel);
    layer.bias = Eigen::VectorXf::Zero(spec.out_channels);
    w.layers.push_back(std::move(layer));
  }
  return w;
}

void EncoderWeights::CheckAgainst(const EncoderConfig& cfg) const {
  if (layers.size() != cfg.layers.size()) {
    throw Error(ErrorCode::kWeightShapeMismatch,
                "weights have " + std::to_string(layers.size()) + " layers, config has " +
                    std::to_string(cfg.layers.size()));
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i].spec;
    const auto& b = cfg.layers[i];
    if (a.kernel != b.kernel || a.stride != b.stride || a.in_channels != b.in_channels ||
        a.out_channels != b.out_channels ||
        layers[i].weight.rows() != b.out_channels ||
        layers[i].weight.cols() != b.in_channels * b.kernel ||
        layers[i].bias.size() != b.out_channels) {
      throw Error(ErrorCode::kWeightShapeMismatch, "layer " + std::to_string(i) + " shape differs");
    }
  }
}

int EncoderOutputLength(std::size_t n_samples, const EncoderConfig& cfg) {
  if (n_samples < static_cast<std::size_t>(cfg.receptive_field())) {
    throw Error(ErrorCode::kDegenerateInput,
                "clip of " + std::to_string(n_samples) + " samples is shorter than the " +
                    std::to_string(cfg.receptive_field()) + "-sample receptive field");
  }
  auto length = static_cast<long long>(n_samples);
  for (const auto& l : cfg.layers) length = (length - l.kernel) / l.stride + 1;
  return static_cast<int>(length);
}

EncoderFeatures ApplyEncoder(const AudioClip& clip, const EncoderConfig& cfg,
                             const EncoderWeights& weights) {
  weights.CheckAgainst(cfg);
  if (clip.sample_rate != kCanonicalSampleRate) {
    throw Error(ErrorCode::kDegenerateInput, "encoder expects 16 kHz input");
  }
  const int expected = EncoderOutputLength(clip.samples.size(), cfg);

  // Activations are channels x time, column-major, so the receptive window of
  // output step t is one contiguous run starting at column t * stride.
  Eigen::MatrixXf x(1, static_cast<Eigen::Index>(clip.samples.size()));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) x(0, i) = static_cast<float>(clip.samples[i]);

  for (const auto& layer : weights.layers) {
    const auto& s = layer.spec;
    const Eigen::Index out_len = (x.cols() - s.kernel) / s.stride + 1;
    Eigen::Map<const Eigen::MatrixXf, 0, Eigen::OuterStride<>> windows(
        x.data(), static_cast<Eigen::Index>(s.in_channels) * s.kernel, out_len,
        Eigen::OuterStride<>(static_cast<Eigen::Index>(s.stride) * s.in_channels));
    Eigen::MatrixXf y = layer.weight * windows;
    y.colwise() += layer.bias;
    x = y.unaryExpr([](float v) { return static_cast<float>(Gelu(static_cast<double>(v))); });
  }
  if (x.cols() != expected) {
    throw Error(ErrorCode::kShapeMismatch, "encoder produced unexpected frame count");
  }
  EncoderFeatures out;
  out.values = x.transpose().cast<double>();
  return out;
}

std::vector<std::uint8_t> SerializeEncoderWeights(const EncoderWeights& w) {
  ByteWriter out;
  out.Magic("VXW1");
  out.U32(static_cast<std::uint32_t>(w.layers.size()));
  for (const auto& layer : w.layers) {
    const auto& s = layer.spec;
    out.U32(static_cast<std::uint32_t>(s.kernel));
    out.U32(static_cast<std::uint32_t>(s.stride));
    out.U32(static_cast<std::uint32_t>(s.in_channels));
    out.U32(static_cast<std::uint32_t>(s.out_channels));
    for (int o = 0; o < s.out_channels; ++o) {
      for (int c = 0; c < s.in_channels; ++c) {
        for (int k = 0; k < s.kernel; ++k) out.F32(layer.weight(o, k * s.in_channels + c));
      }
    }
    for (int o = 0; o < s.out_channels; ++o) out.F32(layer.bias(o));
  }
  return std::move(out.bytes());
}

EncoderWeights ParseEncoderWeights(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.ExpectMagic("VXW1");
  const std::uint32_t n_layers = in.U32();
  if (n_layers > 64) throw Error(ErrorCode::kMalformedFile, "implausible layer count");
  EncoderWeights w;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    EncoderLayerWeights layer;
    auto& s = layer.spec;
    s.kernel = static_cast<int>(in.U32());
    s.stride = static_cast<int>(in.U32());
    s.in_channels = static_cast<int>(in.U32());
    s.out_channels = static_cast<int>(in.U32());
    if (s.kernel <= 0 || s.stride <= 0 || s.in_channels <= 0 || s.out_channels <= 0 ||
        s.kernel > 4096 || s.in_channels > 1 << 14 || s.out_channels > 1 << 14) {
      throw Error(ErrorCode::kMalformedFile, "bad layer header");
    }
    layer.weight.resize(s.out_channels, static_cast<Eigen::Index>(s.in_channels) * s.kernel);
    for (int o = 0; o < s.out_channels; ++o) {
      for (int c = 0; c < s.in_channels; ++c) {
        for (int k = 0; k < s.kernel; ++k) layer.weight(o, k * s.in_channels + c) = in.F32();
      }
    }
    layer.bias.resize(s.out_channels);
    for (int o = 0; o < s.out_channels; ++o) layer.bias(o) = in.F32();
    w.layers.push_back(std::move(layer));
  }
  if (!in.AtEnd()) throw Error(ErrorCode::kMalformedFile, "trailing bytes after weights");
  return w;
}

EncoderWeights LoadEncoderWeights(const std::filesystem::path& path, const EncoderConfig& cfg) {
  auto w = ParseEncoderWeights(ReadFile(path));
  w.CheckAgainst(cfg);
  return w;
}

}  // namespace voxscreen
