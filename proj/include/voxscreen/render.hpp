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

#ifndef VOXSCREEN_RENDER_HPP_
#define VOXSCREEN_RENDER_HPP_

#include <filesystem>
#include <span>
#include <vector>

#include "voxscreen/dsp.hpp"
#include "voxscreen/types.hpp"

namespace voxscreen {

enum class ImageSource { kMfcc, kMelSpectrogram };

inline constexpr int kImageSize = 150;
inline constexpr int kImageChannels = 3;

// Square image stored row-major, channel-interleaved (HWC). Row 0 is the top.
struct FeatureImage {
  int height = kImageSize;
  int width = kImageSize;
  std::vector<float> pixels;  // height * width * 3, values in [0, 1]
  ImageSource source = ImageSource::kMelSpectrogram;

  float at(int row, int col, int channel) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * kImageChannels + channel];
  }
};

// Min-max scale to [0, 1] (a constant matrix maps to 0.5), bilinear resize
// with corner alignment to size x size, frames along x and coefficient index
// increasing upward, gray replicated into three channels.
FeatureImage RenderImage(const RowMatrix& frames_by_coeffs, ImageSource source,
                         int size = kImageSize);
inline FeatureImage RenderImage(const MfccMatrix& m) {
  return RenderImage(m.values, ImageSource::kMfcc);
}
inline FeatureImage RenderImage(const MelSpectrogram& m) {
  return RenderImage(m.values, ImageSource::kMelSpectrogram);
}

// 8-bit RGB PNG, value = round(255 * pixel).
void WritePng(const FeatureImage& image, const std::filesystem::path& path);

// Per-dimension z-scoring fitted on training rows only. Zero-variance
// dimensions keep a scale of 1.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Vector mean, Vector scale);

  static Standardizer Fit(std::span<const Vector> rows);

  Vector Apply(const Vector& v) const;
  // Applies column-wise to every row of a frames x dims matrix.
  RowMatrix ApplyRows(const RowMatrix& m) const;

  const Vector& mean() const { return mean_; }
  const Vector& scale() const { return scale_; }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  Vector scale_;
};

}  // namespace voxscreen

#endif  // VOXSCREEN_RENDER_HPP_
