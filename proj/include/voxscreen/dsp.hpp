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

#ifndef VOXSCREEN_DSP_HPP_
#define VOXSCREEN_DSP_HPP_

#include <complex>
#include <span>
#include <vector>

#include "voxscreen/audio_io.hpp"
#include "voxscreen/types.hpp"

namespace voxscreen {

enum class Window {
  kHannPeriodic,
  // Only meant for tests that need an untapered frame.
  kRectangular,
};

struct FrameParams {
  int frame_length = 2048;  // power of two
  int hop_length = 512;
  bool centered = true;     // reflection-pad frame_length/2 on both sides
  Window window = Window::kHannPeriodic;

  void Validate() const;
  int n_bins() const { return frame_length / 2 + 1; }
};

struct MelParams {
  int n_mels = 64;
  int n_mfcc = 40;
  double f_min = 0.0;
  double f_max = 0.0;  // <= 0 selects the Nyquist frequency
  double log_floor = 1e-10;

  double ResolvedFMax(int sample_rate) const {
    return f_max > 0.0 ? f_max : sample_rate / 2.0;
  }
  void Validate(int sample_rate) const;
};

struct MelSpectrogram {
  RowMatrix values;  // frames x n_mels, natural-log power
  FrameParams frame;
  MelParams mel;
  int sample_rate = kCanonicalSampleRate;
};

struct MfccMatrix {
  RowMatrix values;  // frames x n_mfcc; column 0 is c0
  FrameParams frame;
  MelParams mel;
  int sample_rate = kCanonicalSampleRate;
};

struct FeatureVector {
  Vector values;
};

struct MelFilterbank {
  RowMatrix weights;              // n_mels x n_bins
  std::vector<double> center_hz;  // n_mels
  std::vector<double> edge_hz;    // n_mels + 2, mel-equispaced
};

// Frames produced for n_samples under p.
int FrameCount(std::size_t n_samples, const FrameParams& p);

// Periodic Hann: w[k] = 0.5 (1 - cos(2 pi k / n)).
std::vector<double> HannWindow(int n);
std::vector<double> MakeWindow(const FrameParams& p);

// In-place iterative radix-2 FFT; size must be a power of two.
void Fft(std::span<std::complex<double>> data);
bool IsPowerOfTwo(std::size_t n);

// |FFT(window * frame)|^2 over bins 0..n/2.
std::vector<double> PowerSpectrum(std::span<const double> frame,
                                  std::span<const double> window);

// n_frames x (frame_length/2 + 1).
RowMatrix StftPower(const AudioClip& clip, const FrameParams& p);

// HTK mel scale.
double HzToMel(double hz);
double MelToHz(double mel);

MelFilterbank BuildMelFilterbank(int sample_rate, const FrameParams& p,
                                 const MelParams& m);

MelSpectrogram ComputeMelSpectrogram(const AudioClip& clip, const FrameParams& p,
                                     const MelParams& m);
MfccMatrix ComputeMfcc(const AudioClip& clip, const FrameParams& p,
                       const MelParams& m);

// Orthonormal DCT-II and its inverse (DCT-III).
std::vector<double> DctOrthonormal(std::span<const double> x);
std::vector<double> InverseDctOrthonormal(std::span<const double> c);

FeatureVector MfccMeanVector(const MfccMatrix& mfcc);

}  // namespace voxscreen

#endif  // VOXSCREEN_DSP_HPP_
