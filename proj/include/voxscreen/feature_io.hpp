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

#ifndef VOXSCREEN_FEATURE_IO_HPP_
#define VOXSCREEN_FEATURE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "voxscreen/render.hpp"
#include "voxscreen/types.hpp"

namespace voxscreen {

// Tag byte of a "VXF1" feature dump.
enum class FeatureDumpKind : std::uint8_t {
  kMfcc = 0,
  kMelSpectrogram = 1,
  kVector = 2,
  kEncoder = 3,
  // Images are stored as height rows x (width * 3) interleaved columns.
  kMfccImage = 4,
  kMelSpectrogramImage = 5,
};

struct FeatureDump {
  FeatureDumpKind kind = FeatureDumpKind::kVector;
  RowMatrix values;
};

// "VXF1", u32 rows, u32 cols, u8 kind, rows*cols float32 row-major.
std::vector<std::uint8_t> SerializeFeatureDump(const FeatureDump& dump);
FeatureDump ParseFeatureDump(std::span<const std::uint8_t> bytes);

FeatureDump DumpFromImage(const FeatureImage& image);
FeatureImage ImageFromDump(const FeatureDump& dump);

}  // namespace voxscreen

#endif  // VOXSCREEN_FEATURE_IO_HPP_
