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
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "voxscreen/audio_io.hpp"
#include "voxscreen/dsp.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/feature_io.hpp"
#include "voxscreen/render.hpp"
#include "voxscreen/rng.hpp"

using namespace voxscreen;

namespace {

RowMatrix RandomMatrix(int rows, int cols, Rng& rng) {
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Normal();
  return m;
}

}  // namespace

TEST_CASE("constant matrix renders mid gray") {
  const FeatureImage img = RenderImage(RowMatrix::Constant(32, 64, -3.0), ImageSource::kMelSpectrogram);
  CHECK(img.height == 150);
  CHECK(img.width == 150);
  REQUIRE(img.pixels.size() == 150u * 150u * 3u);
  for (float v : img.pixels) CHECK(v == 0.5f);
}

TEST_CASE("a 150x150 unit-range matrix renders as itself") {
  Rng rng(1);
  RowMatrix m(150, 150);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform();
  m(3, 7) = 0.0;
  m(100, 20) = 1.0;
  const FeatureImage img = RenderImage(m, ImageSource::kMfcc);
  CHECK(img.source == ImageSource::kMfcc);
  // Frames run left to right, coefficient index increases upward.
  for (int r = 0; r < 150; ++r) {
    for (int c = 0; c < 150; ++c) {
      for (int ch = 0; ch < 3; ++ch) CHECK(std::abs(img.at(r, c, ch) - m(c, 149 - r)) <= 1e-6);
    }
  }
}

TEST_CASE("rendered channels are identical and in range") {
  Rng rng(2);
  const FeatureImage img = RenderImage(RandomMatrix(32, 40, rng), ImageSource::kMfcc);
  for (int r = 0; r < 150; ++r) {
    for (int c = 0; c < 150; ++c) {
      CHECK(img.at(r, c, 0) == img.at(r, c, 1));
      CHECK(img.at(r, c, 1) == img.at(r, c, 2));
    }
  }
  for (float v : img.pixels) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("render absorbs affine rescaling") {
  Rng rng(3);
  const RowMatrix m = RandomMatrix(20, 64, rng);
  const FeatureImage a = RenderImage(m, ImageSource::kMelSpectrogram);
  const FeatureImage b = RenderImage((3.5 * m.array() - 12.0).matrix(), ImageSource::kMelSpectrogram);
  for (std::size_t i = 0; i < a.pixels.size(); ++i) CHECK(std::abs(a.pixels[i] - b.pixels[i]) <= 1e-6f);
}

TEST_CASE("render rejects empty input") {
  CHECK_THROWS_AS(RenderImage(RowMatrix(0, 40), ImageSource::kMfcc), Error);
}

TEST_CASE("render of real spectrogram and png export") {
  const MelSpectrogram mel = ComputeMelSpectrogram(SynthClipAudio(1, 2, 1.0), FrameParams{}, MelParams{});
  const FeatureImage img = RenderImage(mel);
  const auto path = std::filesystem::temp_directory_path() / "voxscreen_render_test.png";
  WritePng(img, path);
  const auto bytes = ReadFile(path);
  REQUIRE(bytes.size() > 8);
  CHECK(bytes[1] == 'P');
  CHECK(bytes[2] == 'N');
  CHECK(bytes[3] == 'G');
  std::filesystem::remove(path);
}

TEST_CASE("standardizer hand example") {
  std::vector<Vector> rows = {Vector::Constant(1, 1.0), Vector::Constant(1, 3.0)};
  const Standardizer s = Standardizer::Fit(rows);
  CHECK(s.mean()(0) == 2.0);
  CHECK(s.scale()(0) == 1.0);
  CHECK(s.Apply(Vector::Constant(1, 3.0))(0) == 1.0);
}

TEST_CASE("standardizer zero variance and moments") {
  Rng rng(6);
  std::vector<Vector> rows;
  for (int i = 0; i < 50; ++i) {
    Vector v(3);
    v << rng.Normal() * 4.0 + 1.0, 7.0, rng.Uniform(-2.0, 5.0);
    rows.push_back(v);
  }
  const Standardizer s = Standardizer::Fit(rows);
  CHECK(s.scale()(1) == 1.0);
  Vector v(3);
  v << 0.0, 9.0, 0.0;
  CHECK(s.Apply(v)(1) == 2.0);

  Vector mean = Vector::Zero(3), sq = Vector::Zero(3);
  for (const auto& r : rows) {
    const Vector z = s.Apply(r);
    mean += z;
    sq += z.cwiseProduct(z);
  }
  mean /= rows.size();
  sq /= rows.size();
  for (int d = 0; d < 3; ++d) CHECK(std::abs(mean(d)) <= 1e-9);
  CHECK(std::abs(std::sqrt(sq(0)) - 1.0) <= 1e-6);
  CHECK(std::abs(std::sqrt(sq(2)) - 1.0) <= 1e-6);
  CHECK(sq(1) == 0.0);

  CHECK_THROWS_AS(s.Apply(Vector::Zero(2)), Error);
  std::vector<Vector> one = {Vector::Zero(3)};
  CHECK_THROWS_AS(Standardizer::Fit(one), Error);
}

TEST_CASE("standardizer rows apply is affine per column") {
  Rng rng(7);
  std::vector<Vector> rows;
  for (int i = 0; i < 10; ++i) rows.push_back(Vector::NullaryExpr(4, [&] { return rng.Normal(); }));
  const Standardizer s = Standardizer::Fit(rows);
  const RowMatrix frames = RandomMatrix(6, 4, rng);
  const RowMatrix out = s.ApplyRows(frames);
  for (int r = 0; r < 6; ++r) {
    const Vector expect = s.Apply(frames.row(r).transpose());
    CHECK((out.row(r).transpose() - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("feature dump round trip") {
  Rng rng(8);
  FeatureDump d;
  d.kind = FeatureDumpKind::kMfcc;
  d.values = RandomMatrix(32, 40, rng).cast<float>().cast<double>();
  const auto bytes = SerializeFeatureDump(d);
  CHECK(bytes.size() == 4 + 4 + 4 + 1 + 32 * 40 * 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "VXF1");
  CHECK(bytes[4] == 32);
  CHECK(bytes[8] == 40);
  CHECK(bytes[12] == 0);
  const FeatureDump back = ParseFeatureDump(bytes);
  CHECK(back.kind == FeatureDumpKind::kMfcc);
  CHECK(back.values == d.values);

  auto bad_tag = bytes;
  bad_tag[12] = 9;
  CHECK_THROWS_AS(ParseFeatureDump(bad_tag), Error);
  auto short_payload = bytes;
  short_payload.pop_back();
  CHECK_THROWS_AS(ParseFeatureDump(short_payload), Error);
}

TEST_CASE("image dump round trip") {
  Rng rng(9);
  const FeatureImage img = RenderImage(RandomMatrix(10, 12, rng), ImageSource::kMfcc);
  const FeatureDump d = DumpFromImage(img);
  CHECK(d.kind == FeatureDumpKind::kMfccImage);
  CHECK(d.values.rows() == 150);
  CHECK(d.values.cols() == 450);
  const FeatureImage back = ImageFromDump(ParseFeatureDump(SerializeFeatureDump(d)));
  CHECK(back.pixels == img.pixels);
  CHECK(back.source == ImageSource::kMfcc);

  FeatureDump vec;
  vec.kind = FeatureDumpKind::kVector;
  vec.values = RowMatrix::Zero(1, 40);
  try {
    ImageFromDump(vec);
    FAIL("expected FeatureKindMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFeatureKindMismatch);
  }
}
