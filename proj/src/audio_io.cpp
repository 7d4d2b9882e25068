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

#include "voxscreen/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <optional>

#include "voxscreen/error.hpp"
#include "voxscreen/rng.hpp"

namespace voxscreen {
namespace {

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 |
         static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

bool TagIs(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

std::vector<std::uint8_t> EncodeWav(const AudioClip& clip, std::uint16_t format,
                                    std::uint16_t bits) {
  const std::uint32_t bytes_per_sample = bits / 8;
  const auto data_bytes =
      static_cast<std::uint32_t>(clip.samples.size() * bytes_per_sample);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(clip.sample_rate) * bytes_per_sample);
  PutU16(out, static_cast<std::uint16_t>(bytes_per_sample));
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double s : clip.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    if (format == 1) {
      const double scaled = std::round(c * 32768.0);
      const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      PutU16(out, static_cast<std::uint16_t>(v));
    } else {
      PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(c)));
    }
  }
  return out;
}

}  // namespace

AudioClip LoadWav(std::span<const std::uint8_t> bytes, std::string source_id) {
  if (bytes.size() < 12 || !TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE")) {
    throw Error(ErrorCode::kMalformedHeader, "missing RIFF/WAVE signature");
  }
  std::optional<FmtChunk> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw Error(ErrorCode::kMalformedHeader, "chunk overruns file");
    }
    if (TagIs(bytes, pos, "fmt ")) {
      if (size < 16) throw Error(ErrorCode::kMalformedHeader, "short fmt chunk");
      FmtChunk f;
      f.format = ReadU16(bytes, body);
      f.channels = ReadU16(bytes, body + 2);
      f.sample_rate = ReadU32(bytes, body + 4);
      f.bits = ReadU16(bytes, body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real code in its sub-format GUID.
      if (f.format == 0xFFFE && size >= 40) f.format = ReadU16(bytes, body + 24);
      fmt = f;
    } else if (TagIs(bytes, pos, "data")) {
      if (!fmt) throw Error(ErrorCode::kMalformedHeader, "data chunk before fmt chunk");
      data = bytes.subspan(body, size);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!fmt) throw Error(ErrorCode::kMalformedHeader, "missing fmt chunk");
  if (!data) throw Error(ErrorCode::kMalformedHeader, "missing data chunk");

  const bool pcm16 = fmt->format == 1 && fmt->bits == 16;
  const bool float32 = fmt->format == 3 && fmt->bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                "format " + std::to_string(fmt->format) + " with " +
                    std::to_string(fmt->bits) + " bits");
  }
  if (fmt->channels != 1 && fmt->channels != 2) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                std::to_string(fmt->channels) + " channels");
  }
  if (fmt->sample_rate == 0) {
    throw Error(ErrorCode::kMalformedHeader, "zero sample rate");
  }
  const std::size_t frame_bytes = (fmt->bits / 8u) * fmt->channels;
  const std::size_t n_frames = data->size() / frame_bytes;
  if (n_frames == 0) throw Error(ErrorCode::kEmptyData, "data chunk holds no frames");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt->sample_rate);
  clip.source_id = std::move(source_id);
  clip.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::size_t ch = 0; ch < fmt->channels; ++ch) {
      const std::size_t at = i * frame_bytes + ch * (fmt->bits / 8u);
      double v;
      if (pcm16) {
        v = static_cast<std::int16_t>(ReadU16(*data, at)) / 32768.0;
      } else {
        v = std::bit_cast<float>(ReadU32(*data, at));
        if (!std::isfinite(v)) v = 0.0;
        v = std::clamp(v, -1.0, 1.0);
      }
      acc += v;
    }
    clip.samples[i] = acc / fmt->channels;
  }
  return clip;
}

AudioClip LoadWavFile(const std::filesystem::path& path) {
  const auto bytes = ReadFile(path);
  return LoadWav(bytes, path.string());
}

std::vector<std::uint8_t> EncodeWav16(const AudioClip& clip) {
  return EncodeWav(clip, 1, 16);
}

std::vector<std::uint8_t> EncodeWavFloat32(const AudioClip& clip) {
  return EncodeWav(clip, 3, 32);
}

void WriteFile(const std::filesystem::path& path,
               std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

AudioClip ResampleLinear(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw Error(ErrorCode::kDegenerateInput, "target rate must be positive");
  if (target_rate == clip.sample_rate) return clip;
  if (clip.samples.size() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "need at least 2 samples to resample");
  }
  const std::size_t n_in = clip.samples.size();
  const double ratio = static_cast<double>(clip.sample_rate) / target_rate;
  const auto n_out = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n_in) / ratio)));
  AudioClip out;
  out.sample_rate = target_rate;
  out.source_id = clip.source_id;
  out.samples.resize(n_out);
  for (std::size_t j = 0; j < n_out; ++j) {
    // Rational position keeps integer-ratio grids exact.
    const double pos = static_cast<double>(j) * clip.sample_rate / target_rate;
    const auto left = static_cast<std::size_t>(pos);
    if (left >= n_in - 1) {
      out.samples[j] = clip.samples[n_in - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(left);
    const double a = clip.samples[left];
    const double b = clip.samples[left + 1];
    out.samples[j] = frac == 0.0 ? a : a + frac * (b - a);
  }
  return out;
}

AudioClip PeakNormalize(const AudioClip& clip) {
  double peak = 0.0;
  for (double s : clip.samples) peak = std::max(peak, std::abs(s));
  if (peak == 0.0) return clip;
  AudioClip out = clip;
  for (double& s : out.samples) s = std::clamp(s / peak, -1.0, 1.0);
  return out;
}

SynthClip SynthesizeClip(int class_label, std::uint64_t seed, double duration_s) {
  if (!(duration_s >= kSynthMinDuration)) {
    throw Error(ErrorCode::kDegenerateInput, "synthetic clips need at least 0.5 s");
  }
  if (class_label != 0 && class_label != 1) {
    throw Error(ErrorCode::kBadLabel, "class label must be 0 or 1");
  }
  Rng rng(MixSeed(seed, static_cast<std::uint64_t>(class_label)));
  const bool positive = class_label == 1;
  const double f0 = positive ? rng.Uniform(160.0, 190.0) : rng.Uniform(110.0, 140.0);
  const double snr_db = positive ? 5.0 : 20.0;
  const double rate = kCanonicalSampleRate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate));

  constexpr int kHarmonics = 6;
  double phases[kHarmonics];
  for (double& p : phases) p = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double tremolo_hz = rng.Uniform(4.0, 7.0);
  const double tremolo_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);

  std::vector<double> clean(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double time = static_cast<double>(t) / rate;
    double v = 0.0;
    for (int h = 1; h <= kHarmonics; ++h) {
      v += std::sin(2.0 * std::numbers::pi * h * f0 * time + phases[h - 1]) / h;
    }
    if (positive) {
      v *= 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * tremolo_hz * time + tremolo_phase);
    }
    clean[t] = v;
  }
  std::vector<double> noise(n);
  for (double& v : noise) v = rng.Normal();

  double clean_energy = 0.0, noise_energy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    clean_energy += clean[t] * clean[t];
    noise_energy += noise[t] * noise[t];
  }
  const double noise_gain =
      std::sqrt(clean_energy / (noise_energy * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> mix(n);
  double peak = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    mix[t] = clean[t] + noise_gain * noise[t];
    peak = std::max(peak, std::abs(mix[t]));
  }
  const double gain = 0.9 / peak;
  SynthClip out;
  out.f0_hz = f0;
  out.snr_db = snr_db;
  out.clip.sample_rate = kCanonicalSampleRate;
  out.clip.source_id = "synth:" + std::to_string(class_label) + ":" + std::to_string(seed);
  out.clip.samples.resize(n);
  out.clean.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    out.clip.samples[t] = gain * mix[t];
    out.clean[t] = gain * clean[t];
  }
  return out;
}

double MeasureSnrDb(std::span<const double> mixture, std::span<const double> clean) {
  if (mixture.size() != clean.size() || mixture.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "mixture and clean lengths differ");
  }
  double signal = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    signal += clean[i] * clean[i];
    const double r = mixture[i] - clean[i];
    residual += r * r;
  }
  return 10.0 * std::log10(signal / residual);
}

}  // namespace voxscreen
