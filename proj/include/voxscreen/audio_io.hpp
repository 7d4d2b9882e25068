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

#ifndef VOXSCREEN_AUDIO_IO_HPP_
#define VOXSCREEN_AUDIO_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace voxscreen {

inline constexpr int kCanonicalSampleRate = 16000;

// Mono waveform with samples in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;
  std::string source_id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Decodes a RIFF/WAVE container holding PCM-16 or IEEE float-32 audio with one
// or two channels. Stereo is averaged to mono; PCM-16 value v maps to v/32768.
// Unknown chunks are skipped. Float samples outside [-1, 1] are clamped.
AudioClip LoadWav(std::span<const std::uint8_t> bytes,
                  std::string source_id = {});
AudioClip LoadWavFile(const std::filesystem::path& path);

// Canonical 44-byte-header PCM-16 mono. Samples are clamped and rounded.
std::vector<std::uint8_t> EncodeWav16(const AudioClip& clip);
// IEEE float-32 mono, used where 16-bit quantisation would lose information.
std::vector<std::uint8_t> EncodeWavFloat32(const AudioClip& clip);
void WriteFile(const std::filesystem::path& path,
               std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> ReadFile(const std::filesystem::path& path);

// Linear interpolation onto a new grid; output sample j sits at time
// j / target_rate and samples beyond the last input instant hold its value.
AudioClip ResampleLinear(const AudioClip& clip, int target_rate);

AudioClip PeakNormalize(const AudioClip& clip);

struct SynthClip {
  AudioClip clip;
  // Noise-free component of `clip`, on the same scale.
  std::vector<double> clean;
  double f0_hz = 0.0;
  double snr_db = 0.0;
};

inline constexpr double kSynthMinDuration = 0.5;

// Class 0: harmonic tone, f0 in [110, 140] Hz, 20 dB SNR white noise.
// Class 1: harmonic tone, f0 in [160, 190] Hz, 5 dB SNR, amplitude tremolo.
// Deterministic in (class_label, seed); 16 kHz.
SynthClip SynthesizeClip(int class_label, std::uint64_t seed,
                         double duration_s);
inline AudioClip SynthClipAudio(int class_label, std::uint64_t seed,
                                double duration_s) {
  return SynthesizeClip(class_label, seed, duration_s).clip;
}

// 10*log10(|clean|^2 / |mixture - clean|^2).
double MeasureSnrDb(std::span<const double> mixture,
                    std::span<const double> clean);

}  // namespace voxscreen

#endif  // VOXSCREEN_AUDIO_IO_HPP_
