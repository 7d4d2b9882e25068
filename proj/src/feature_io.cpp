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

#include "voxscreen/feature_io.hpp"

#include "voxscreen/binary_io.hpp"
#include "voxscreen/error.hpp"

namespace voxscreen {

std::vector<std::uint8_t> SerializeFeatureDump(const FeatureDump& dump) {
  ByteWriter out;
  out.Magic("VXF1");
  out.U32(static_cast<std::uint32_t>(dump.values.rows()));
  out.U32(static_cast<std::uint32_t>(dump.values.cols()));
  out.U8(static_cast<std::uint8_t>(dump.kind));
  for (Eigen::Index r = 0; r < dump.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < dump.values.cols(); ++c) {
      out.F32(static_cast<float>(dump.values(r, c)));
    }
  }
  return std::move(out.bytes());
}

FeatureDump ParseFeatureDump(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  in.ExpectMagic("VXF1");
  const std::uint32_t rows = in.U32();
  const std::uint32_t cols = in.U32();
  const std::uint8_t tag = in.U8();
  if (tag > static_cast<std::uint8_t>(FeatureDumpKind::kMelSpectrogramImage)) {
    throw Error(ErrorCode::kMalformedFile, "unknown feature kind tag " + std::to_string(tag));
  }
  if (static_cast<std::uint64_t>(rows) * cols * 4 != bytes.size() - 13) {
    throw Error(ErrorCode::kMalformedFile, "payload size does not match rows x cols");
  }
  FeatureDump dump;
  dump.kind = static_cast<FeatureDumpKind>(tag);
  dump.values.resize(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) dump.values(r, c) = in.F32();
  }
  return dump;
}

FeatureDump DumpFromImage(const FeatureImage& image) {
  FeatureDump dump;
  dump.kind = image.source == ImageSource::kMfcc ? FeatureDumpKind::kMfccImage
                                                  : FeatureDumpKind::kMelSpectrogramImage;
  dump.values.resize(image.height, image.width * kImageChannels);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width * kImageChannels; ++c) {
      dump.values(r, c) = image.pixels[static_cast<std::size_t>(r) * image.width * kImageChannels + c];
    }
  }
  return dump;
}

FeatureImage ImageFromDump(const FeatureDump& dump) {
  if (dump.kind != FeatureDumpKind::kMfccImage &&
      dump.kind != FeatureDumpKind::kMelSpectrogramImage) {
    throw Error(ErrorCode::kFeatureKindMismatch, "dump does not hold an image");
  }
  if (dump.values.cols() % kImageChannels != 0) {
    throw Error(ErrorCode::kMalformedFile, "image dump width is not a multiple of 3");
  }
  FeatureImage image;
  image.height = static_cast<int>(dump.values.rows());
  image.width = static_cast<int>(dump.values.cols() / kImageChannels);
  image.source = dump.kind == FeatureDumpKind::kMfccImage ? ImageSource::kMfcc
                                                           : ImageSource::kMelSpectrogram;
  image.pixels.resize(static_cast<std::size_t>(dump.values.size()));
  for (Eigen::Index r = 0; r < dump.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < dump.values.cols(); ++c) {
      image.pixels[static_cast<std::size_t>(r * dump.values.cols() + c)] =
          static_cast<float>(dump.values(r, c));
    }
  }
  return image;
}

}  // namespace voxscreen
