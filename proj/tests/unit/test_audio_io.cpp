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
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "voxscreen/audio_io.hpp"
#include "voxscreen/error.hpp"
#include "voxscreen/rng.hpp"

using namespace voxscreen;

namespace {

void Put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}

void Put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

void PutTag(std::vector<std::uint8_t>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

// Hand-assembled RIFF file; extra_chunk is inserted between fmt and data.
std::vector<std::uint8_t> MakeWav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                                  std::uint16_t bits, const std::vector<std::uint8_t>& data,
                                  bool extra_chunk = false) {
  std::vector<std::uint8_t> body;
  PutTag(body, "WAVE");
  PutTag(body, "fmt ");
  Put32(body, 16);
  Put16(body, format);
  Put16(body, channels);
  Put32(body, rate);
  Put32(body, rate * channels * bits / 8);
  Put16(body, channels * bits / 8);
  Put16(body, bits);
  if (extra_chunk) {
    PutTag(body, "LIST");
    Put32(body, 3);
    body.insert(body.end(), {'a', 'b', 'c', 0});  // odd size plus pad byte
  }
  PutTag(body, "data");
  Put32(body, static_cast<std::uint32_t>(data.size()));
  body.insert(body.end(), data.begin(), data.end());
  std::vector<std::uint8_t> out;
  PutTag(out, "RIFF");
  Put32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<std::uint8_t> Pcm16(std::initializer_list<std::uint16_t> values) {
  std::vector<std::uint8_t> b;
  for (auto v : values) Put16(b, v);
  return b;
}

ErrorCode CodeOf(const std::vector<std::uint8_t>& bytes) {
  try {
    LoadWav(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("wav 16-bit extremes and stereo mixdown") {
  const auto canonical = MakeWav(1, 1, 16000, 16, Pcm16({0x8000}));
  CHECK(canonical.size() == 46);
  AudioClip c = LoadWav(canonical);
  REQUIRE(c.samples.size() == 1);
  CHECK(c.samples[0] == -1.0);
  CHECK(c.sample_rate == 16000);

  c = LoadWav(MakeWav(1, 1, 16000, 16, Pcm16({0x7FFF})));
  CHECK(c.samples[0] == 0.999969482421875);

  c = LoadWav(MakeWav(1, 2, 8000, 16, Pcm16({0x4000, 0x0000})));
  REQUIRE(c.samples.size() == 1);
  CHECK(c.samples[0] == 0.25);
  CHECK(c.sample_rate == 8000);
}

TEST_CASE("wav float32 and unknown chunks") {
  std::vector<std::uint8_t> data;
  for (float f : {0.5f, -0.125f}) Put32(data, std::bit_cast<std::uint32_t>(f));
  const AudioClip c = LoadWav(MakeWav(3, 1, 22050, 32, data, /*extra_chunk=*/true));
  REQUIRE(c.samples.size() == 2);
  CHECK(c.samples[0] == 0.5);
  CHECK(c.samples[1] == -0.125);
  CHECK(c.sample_rate == 22050);
}

TEST_CASE("wav errors are typed") {
  auto bad = MakeWav(1, 1, 16000, 16, Pcm16({1}));
  bad[0] = 'X';
  CHECK(CodeOf(bad) == ErrorCode::kMalformedHeader);
  CHECK(CodeOf(MakeWav(2, 1, 16000, 16, Pcm16({1}))) == ErrorCode::kUnsupportedEncoding);
  CHECK(CodeOf(MakeWav(1, 1, 16000, 16, {})) == ErrorCode::kEmptyData);
  CHECK(CodeOf(std::vector<std::uint8_t>{'R', 'I'}) == ErrorCode::kMalformedHeader);
}

TEST_CASE("wav loader never aborts on shuffled bytes") {
  const auto valid = EncodeWav16(SynthClipAudio(1, 3, 0.5));
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto bytes = valid;
    // Permute a random prefix window so the header is usually disturbed.
    const std::size_t window = 8 + rng.Index(120);
    std::vector<std::uint8_t> head(bytes.begin(), bytes.begin() + window);
    rng.Shuffle(head);
    std::copy(head.begin(), head.end(), bytes.begin());
    try {
      const AudioClip c = LoadWav(bytes);
      for (double s : c.samples) CHECK(std::abs(s) <= 1.0);
    } catch (const Error&) {
    }
  }
}

TEST_CASE("wav 16-bit round trip within one quantization step") {
  const AudioClip clip = SynthClipAudio(0, 11, 0.5);
  const AudioClip back = LoadWav(EncodeWav16(clip));
  REQUIRE(back.samples.size() == clip.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    worst = std::max(worst, std::abs(back.samples[i] - clip.samples[i]));
  }
  CHECK(worst <= 1.0 / 32768.0);
  CHECK(back.sample_rate == clip.sample_rate);
}

TEST_CASE("wav float32 round trip is exact for float values") {
  AudioClip clip;
  clip.samples = {0.0, 0.25, -0.75, 1.0, -1.0};
  const AudioClip back = LoadWav(EncodeWavFloat32(clip));
  CHECK(back.samples == clip.samples);
}

TEST_CASE("resample identity, hand example and constants") {
  const AudioClip clip = SynthClipAudio(1, 4, 0.5);
  const AudioClip same = ResampleLinear(clip, clip.sample_rate);
  CHECK(same.samples == clip.samples);

  AudioClip two;
  two.samples = {0.0, 1.0};
  two.sample_rate = 2;
  const AudioClip up = ResampleLinear(two, 4);
  CHECK(up.samples == std::vector<double>{0.0, 0.5, 1.0, 1.0});
  CHECK(up.sample_rate == 4);

  AudioClip flat;
  flat.samples.assign(101, 0.3);
  flat.sample_rate = 44100;
  for (int rate : {8000, 16000, 48000}) {
    for (double s : ResampleLinear(flat, rate).samples) CHECK(s == doctest::Approx(0.3).epsilon(1e-15));
  }

  AudioClip one;
  one.samples = {0.5};
  CHECK_THROWS_AS(ResampleLinear(one, 8000), Error);
}

TEST_CASE("resample preserves duration within one sample") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    AudioClip c;
    c.sample_rate = 8000 + static_cast<int>(rng.Index(40000));
    c.samples.assign(50 + rng.Index(5000), 0.1);
    const int target = 8000 + static_cast<int>(rng.Index(40000));
    const AudioClip r = ResampleLinear(c, target);
    CHECK(std::abs(r.duration_seconds() - c.duration_seconds()) <= 1.0 / target + 1e-12);
  }
}

TEST_CASE("resample up then down recovers a band-limited sine") {
  AudioClip c;
  c.sample_rate = 8000;
  for (int i = 0; i < 800; ++i) c.samples.push_back(0.8 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 8000.0));
  const AudioClip back = ResampleLinear(ResampleLinear(c, 16000), 8000);
  REQUIRE(back.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) CHECK(std::abs(back.samples[i] - c.samples[i]) <= 1e-6);
}

TEST_CASE("peak normalize") {
  AudioClip c;
  c.samples = {0.5, -0.25};
  CHECK(PeakNormalize(c).samples == std::vector<double>{1.0, -0.5});
  c.samples = {0.0, 0.0, 0.0};
  CHECK(PeakNormalize(c).samples == c.samples);
  c.samples = {1.0, -1.0};
  CHECK(PeakNormalize(c).samples == c.samples);
}

TEST_CASE("synthetic clips are deterministic and class-shaped") {
  const SynthClip a = SynthesizeClip(0, 7, 1.0);
  const SynthClip b = SynthesizeClip(0, 7, 1.0);
  CHECK(a.clip.samples == b.clip.samples);
  CHECK(a.clip.samples.size() == 16000);
  CHECK(a.clip.sample_rate == 16000);
  CHECK(a.f0_hz >= 110.0);
  CHECK(a.f0_hz <= 140.0);
  CHECK(MeasureSnrDb(a.clip.samples, a.clean) == doctest::Approx(20.0).epsilon(0.5 / 20.0));

  for (std::uint64_t seed : {1ull, 2ull, 3ull, 1234ull}) {
    const SynthClip p = SynthesizeClip(1, seed, 1.0);
    CHECK(p.f0_hz >= 160.0);
    CHECK(p.f0_hz <= 190.0);
    CHECK(std::abs(MeasureSnrDb(p.clip.samples, p.clean) - 5.0) <= 0.5);
    for (double s : p.clip.samples) CHECK(std::abs(s) <= 1.0);
  }
  CHECK(SynthesizeClip(1, 1, 1.0).clip.samples != SynthesizeClip(1, 2, 1.0).clip.samples);
  CHECK_THROWS_AS(SynthesizeClip(0, 1, 0.25), Error);
}
