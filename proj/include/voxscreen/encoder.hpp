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

#ifndef VOXSCREEN_ENCODER_HPP_
#define VOXSCREEN_ENCODER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "voxscreen/audio_io.hpp"
#include "voxscreen/types.hpp"

namespace voxscreen {

struct EncoderLayerSpec {
  int kernel = 0;
  int stride = 0;
  int in_channels = 0;
  int out_channels = 0;
};

// Seven strided 1-D convolutions over the raw 16 kHz waveform.
struct EncoderConfig {
  std::vector<EncoderLayerSpec> layers;

  static EncoderConfig Default();  // 512 channels, strides 5,2,2,2,2,2,2 / kernels 10,3,3,3,3,2,2
  int stride_product() const;
  int receptive_field() const;
  int out_channels() const { return layers.empty() ? 0 : layers.back().out_channels; }
};

struct EncoderLayerWeights {
  EncoderLayerSpec spec;
  // out_channels x (in_channels * kernel); column index = tap * in_channels + channel.
  Eigen::MatrixXf weight;
  Eigen::VectorXf bias;
};

struct EncoderWeights {
  std::vector<EncoderLayerWeights> layers;

  static EncoderWeights Seeded(const EncoderConfig& cfg, std::uint64_t seed);
  static EncoderWeights Zero(const EncoderConfig& cfg);
  // Throws WeightShapeMismatch unless layer specs match cfg.
  void CheckAgainst(const EncoderConfig& cfg) const;
};

struct EncoderFeatures {
  RowMatrix values;  // frames x channels
};

// L <- floor((L - kernel) / stride) + 1 per layer.
int EncoderOutputLength(std::size_t n_samples, const EncoderConfig& cfg);

// GELU after every layer; no normalisation.
EncoderFeatures ApplyEncoder(const AudioClip& clip, const EncoderConfig& cfg,
                             const EncoderWeights& weights);

// "VXW1" container: u32 layer count, then per layer u32 kernel, stride,
// in_ch, out_ch followed by float32 weights [out][in][tap] and bias [out].
std::vector<std::uint8_t> SerializeEncoderWeights(const EncoderWeights& w);
EncoderWeights ParseEncoderWeights(std::span<const std::uint8_t> bytes);
EncoderWeights LoadEncoderWeights(const std::filesystem::path& path,
                                  const EncoderConfig& cfg);

}  // namespace voxscreen

#endif  // VOXSCREEN_ENCODER_HPP_
