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

#include "voxscreen/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "voxscreen/error.hpp"

namespace voxscreen {
namespace {

// Reflection about the end samples without repeating them, applied as
// often as needed for pads longer than the signal.
std::size_t ReflectIndex(std::ptrdiff_t idx, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t m = idx % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

void FrameParams::Validate() const {
  if (frame_length <= 0 || !IsPowerOfTwo(static_cast<std::size_t>(frame_length))) {
    throw Error(ErrorCode::kConfigError, "frame_length must be a power of two");
  }
  if (hop_length <= 0 || hop_length > frame_length) {
    throw Error(ErrorCode::kConfigError, "hop_length must lie in (0, frame_length]");
  }
}

void MelParams::Validate(int sample_rate) const {
  if (n_mels <= 0 || n_mfcc <= 0 || n_mfcc > n_mels) {
    throw Error(ErrorCode::kConfigError, "need 0 < n_mfcc <= n_mels");
  }
  const double hi = ResolvedFMax(sample_rate);
  if (!(f_min >= 0.0) || !(f_min < hi) || hi > sample_rate / 2.0) {
    throw Error(ErrorCode::kConfigError, "need 0 <= f_min < f_max <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) throw Error(ErrorCode::kConfigError, "log_floor must be positive");
}

int FrameCount(std::size_t n_samples, const FrameParams& p) {
  if (p.centered) return static_cast<int>(n_samples / p.hop_length) + 1;
  if (n_samples < static_cast<std::size_t>(p.frame_length)) return 0;
  return static_cast<int>((n_samples - p.frame_length) / p.hop_length) + 1;
}

std::vector<double> HannWindow(int n) {
  if (n < 2) throw Error(ErrorCode::kDegenerateInput, "Hann window needs n >= 2");
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / n));
  }
  return w;
}

std::vector<double> MakeWindow(const FrameParams& p) {
  if (p.window == Window::kRectangular) return std::vector<double>(p.frame_length, 1.0);
  return HannWindow(p.frame_length);
}

bool IsPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void Fft(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (!IsPowerOfTwo(n)) throw Error(ErrorCode::kDegenerateInput, "FFT size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Twiddles evaluated directly rather than by recurrence; keeps the
        // large-size error at a few ulps.
        const std::complex<double> w(std::cos(angle * k), std::sin(angle * k));
        const auto u = data[start + k];
        const auto v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

std::vector<double> PowerSpectrum(std::span<const double> frame,
                                  std::span<const double> window) {
  if (frame.size() != window.size()) {
    throw Error(ErrorCode::kLengthMismatch, "frame and window lengths differ");
  }
  std::vector<std::complex<double>> buf(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i] * window[i];
  Fft(buf);
  std::vector<double> power(frame.size() / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(buf[k]);
  return power;
}

RowMatrix StftPower(const AudioClip& clip, const FrameParams& p) {
  p.Validate();
  if (clip.samples.empty()) throw Error(ErrorCode::kDegenerateInput, "empty clip");
  const std::size_t n = clip.samples.size();
  const int frames = FrameCount(n, p);
  const auto window = MakeWindow(p);
  const std::ptrdiff_t offset = p.centered ? p.frame_length / 2 : 0;
  RowMatrix out(frames, p.n_bins());
  std::vector<double> frame(p.frame_length);
  for (int f = 0; f < frames; ++f) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(f) * p.hop_length - offset;
    for (int i = 0; i < p.frame_length; ++i) {
      frame[i] = clip.samples[ReflectIndex(start + i, n)];
    }
    const auto power = PowerSpectrum(frame, window);
    for (int k = 0; k < p.n_bins(); ++k) out(f, k) = power[k];
  }
  return out;
}

double HzToMel(double hz) {
  if (!(hz >= 0.0)) throw Error(ErrorCode::kDomainError, "negative frequency");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double MelToHz(double mel) {
  if (!(mel >= 0.0)) throw Error(ErrorCode::kDomainError, "negative mel value");
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank BuildMelFilterbank(int sample_rate, const FrameParams& p,
                                 const MelParams& m) {
  p.Validate();
  m.Validate(sample_rate);
  const double lo_mel = HzToMel(m.f_min);
  const double hi_mel = HzToMel(m.ResolvedFMax(sample_rate));
  MelFilterbank bank;
  bank.edge_hz.resize(m.n_mels + 2);
  for (int i = 0; i < m.n_mels + 2; ++i) {
    const double mel = lo_mel + (hi_mel - lo_mel) * i / (m.n_mels + 1);
    bank.edge_hz[i] = MelToHz(mel);
  }
  const double bin_hz = static_cast<double>(sample_rate) / p.frame_length;
  bank.weights = RowMatrix::Zero(m.n_mels, p.n_bins());
  bank.center_hz.resize(m.n_mels);
  for (int i = 0; i < m.n_mels; ++i) {
    const double lo = bank.edge_hz[i];
    const double center = bank.edge_hz[i + 1];
    const double hi = bank.edge_hz[i + 2];
    bank.center_hz[i] = center;
    if (hi - lo < bin_hz) {
      throw Error(ErrorCode::kInfeasibleBank,
                  "mel filter " + std::to_string(i) + " spans less than one FFT bin");
    }
    double peak = 0.0;
    for (int k = 0; k < p.n_bins(); ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f <= center) {
        w = (f - lo) / (center - lo);
      } else if (f > center && f < hi) {
        w = (hi - f) / (hi - center);
      }
      bank.weights(i, k) = w;
      peak = std::max(peak, w);
    }
    if (peak <= 0.0) {
      throw Error(ErrorCode::kInfeasibleBank,
                  "mel filter " + std::to_string(i) + " covers no FFT bin");
    }
    bank.weights.row(i) /= peak;
  }
  return bank;
}

MelSpectrogram ComputeMelSpectrogram(const AudioClip& clip, const FrameParams& p,
                                     const MelParams& m) {
  const auto bank = BuildMelFilterbank(clip.sample_rate, p, m);
  const RowMatrix power = StftPower(clip, p);
  MelSpectrogram out;
  out.frame = p;
  out.mel = m;
  out.sample_rate = clip.sample_rate;
  out.values = power * bank.weights.transpose();
  const double floor = m.log_floor;
  out.values = out.values.unaryExpr([floor](double v) { return std::log(std::max(v, floor)); });
  return out;
}

std::vector<double> DctOrthonormal(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
    c[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / n);
  }
  return c;
}

std::vector<double> InverseDctOrthonormal(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += c[k] * std::sqrt((k == 0 ? 1.0 : 2.0) / n) *
             std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n));
    }
    x[i] = acc;
  }
  return x;
}

MfccMatrix ComputeMfcc(const AudioClip& clip, const FrameParams& p, const MelParams& m) {
  const MelSpectrogram mel = ComputeMelSpectrogram(clip, p, m);
  const int n_mels = m.n_mels;
  // DCT-II basis restricted to the kept coefficients.
  RowMatrix basis(m.n_mfcc, n_mels);
  for (int k = 0; k < m.n_mfcc; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_mels);
    for (int i = 0; i < n_mels; ++i) {
      basis(k, i) = scale * std::cos(std::numbers::pi * k * (2.0 * i + 1.0) / (2.0 * n_mels));
    }
  }
  MfccMatrix out;
  out.frame = p;
  out.mel = m;
  out.sample_rate = clip.sample_rate;
  out.values = mel.values * basis.transpose();
  return out;
}

FeatureVector MfccMeanVector(const MfccMatrix& mfcc) {
  if (mfcc.values.rows() == 0) throw Error(ErrorCode::kDegenerateInput, "MFCC matrix has no frames");
  FeatureVector v;
  v.values = mfcc.values.colwise().mean().transpose();
  return v;
}

}  // namespace voxscreen
