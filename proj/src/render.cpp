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

#include "voxscreen/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "voxscreen/error.hpp"

namespace voxscreen {
namespace {

double SourcePosition(int out_index, int out_size, Eigen::Index in_size) {
  if (in_size <= 1 || out_size <= 1) return 0.0;
  return static_cast<double>(out_index) * static_cast<double>(in_size - 1) / (out_size - 1);
}

}  // namespace

FeatureImage RenderImage(const RowMatrix& m, ImageSource source, int size) {
  if (m.size() == 0) throw Error(ErrorCode::kDegenerateInput, "cannot render an empty matrix");
  if (!m.allFinite()) throw Error(ErrorCode::kDegenerateInput, "matrix has non-finite entries");
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  const double range = hi - lo;
  const Eigen::Index frames = m.rows();
  const Eigen::Index coeffs = m.cols();
  auto normalized = [&](Eigen::Index f, Eigen::Index c) {
    return range > 0.0 ? (m(f, c) - lo) / range : 0.5;
  };

  FeatureImage img;
  img.height = size;
  img.width = size;
  img.source = source;
  img.pixels.resize(static_cast<std::size_t>(size) * size * kImageChannels);
  for (int row = 0; row < size; ++row) {
    const double v = SourcePosition(size - 1 - row, size, coeffs);
    const auto c0 = static_cast<Eigen::Index>(v);
    const Eigen::Index c1 = std::min(c0 + 1, coeffs - 1);
    const double wc = v - static_cast<double>(c0);
    for (int col = 0; col < size; ++col) {
      const double u = SourcePosition(col, size, frames);
      const auto f0 = static_cast<Eigen::Index>(u);
      const Eigen::Index f1 = std::min(f0 + 1, frames - 1);
      const double wf = u - static_cast<double>(f0);
      const double top = (1.0 - wf) * normalized(f0, c0) + wf * normalized(f1, c0);
      const double bottom = (1.0 - wf) * normalized(f0, c1) + wf * normalized(f1, c1);
      const double value = std::clamp((1.0 - wc) * top + wc * bottom, 0.0, 1.0);
      const auto gray = static_cast<float>(value);
      float* px = &img.pixels[(static_cast<std::size_t>(row) * size + col) * kImageChannels];
      px[0] = px[1] = px[2] = gray;
    }
  }
  return img;
}

void WritePng(const FeatureImage& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, "libpng initialisation failed");
  }
  std::vector<png_byte> row(static_cast<std::size_t>(image.width) * kImageChannels);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, "libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.height; ++r) {
    for (int i = 0; i < image.width * kImageChannels; ++i) {
      const float v = image.pixels[static_cast<std::size_t>(r) * image.width * kImageChannels + i];
      row[i] = static_cast<png_byte>(std::lround(255.0f * std::clamp(v, 0.0f, 1.0f)));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Standardizer::Standardizer(Vector mean, Vector scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "mean and scale lengths differ");
  }
}

Standardizer Standardizer::Fit(std::span<const Vector> rows) {
  if (rows.size() < 2) throw Error(ErrorCode::kDegenerateInput, "standardizer needs >= 2 rows");
  const Eigen::Index dim = rows.front().size();
  Vector mean = Vector::Zero(dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "ragged training rows");
    mean += r;
  }
  mean /= static_cast<double>(rows.size());
  Vector var = Vector::Zero(dim);
  for (const auto& r : rows) var += (r - mean).array().square().matrix();
  var /= static_cast<double>(rows.size());
  Vector scale = var.array().sqrt().matrix();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (!(scale(j) > 1e-12 * std::max(1.0, std::abs(mean(j))))) scale(j) = 1.0;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

Vector Standardizer::Apply(const Vector& v) const {
  if (v.size() != mean_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector has " + std::to_string(v.size()) + " dims, standardizer " +
                    std::to_string(mean_.size()));
  }
  return ((v - mean_).array() / scale_.array()).matrix();
}

RowMatrix Standardizer::ApplyRows(const RowMatrix& m) const {
  if (m.cols() != mean_.size()) throw Error(ErrorCode::kDimensionMismatch, "column count mismatch");
  RowMatrix out = m.rowwise() - mean_.transpose();
  return (out.array().rowwise() / scale_.transpose().array()).matrix();
}

}  // namespace voxscreen
