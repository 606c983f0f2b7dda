// src/dsp/stft.cc

// Copyright 2026  The fse Authors

// See the LICENSE file at the repository root for clarification regarding
// multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "fse/dsp/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fse/dsp/fft.h"
#include "fse/error.h"

namespace fse {

void StftConfig::Validate() const {
  if (fft_size <= 0)
    throw Error(ErrorKind::kInvalidParameter, "fft_size must be positive");
  if (hop_size <= 0 || hop_size > fft_size)
    throw Error(ErrorKind::kInvalidParameter, "hop_size must be in (0, fft]");
  if (fft_size % hop_size != 0 || fft_size / hop_size < 2)
    throw Error(ErrorKind::kInvalidParameter,
                "hann window is not COLA at this hop");
}

namespace dsp {

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

std::size_t FrameCount(std::size_t n, const StftConfig& cfg) {
  const auto hop = static_cast<std::size_t>(cfg.hop_size);
  const auto fft = static_cast<std::size_t>(cfg.fft_size);
  if (cfg.center_padding) return (n + hop - 1) / hop;
  if (n < fft) return 0;
  return 1 + (n - fft) / hop;
}

std::size_t IstftLength(std::size_t frames, const StftConfig& cfg) {
  if (frames == 0) return 0;
  if (cfg.center_padding) return frames * cfg.hop_size;
  return (frames - 1) * cfg.hop_size + cfg.fft_size;
}

std::ptrdiff_t FrameStart(std::size_t t, const StftConfig& cfg) {
  const auto start = static_cast<std::ptrdiff_t>(t) * cfg.hop_size;
  return cfg.center_padding ? start - cfg.fft_size / 2 : start;
}

std::size_t ReflectIndex(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  const std::ptrdiff_t period = 2 * last;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i <= last ? i : period - i);
}

std::vector<double> FrameSignal(std::span<const double> x,
                                const StftConfig& cfg, std::size_t* frames) {
  const std::size_t n = x.size();
  const std::size_t nf = FrameCount(n, cfg);
  const auto fft = static_cast<std::size_t>(cfg.fft_size);
  const auto window = HannWindow(cfg.fft_size);
  std::vector<double> out(nf * fft);
  for (std::size_t t = 0; t < nf; ++t) {
    const std::ptrdiff_t start = FrameStart(t, cfg);
    double* row = out.data() + t * fft;
    for (std::size_t j = 0; j < fft; ++j) {
      const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(j);
      const bool inside = idx >= 0 && idx < static_cast<std::ptrdiff_t>(n);
      const double s = inside ? x[idx] : x[ReflectIndex(idx, n)];
      row[j] = s * window[j];
    }
  }
  if (frames != nullptr) *frames = nf;
  return out;
}

std::vector<std::complex<double>> StftRaw(std::span<const double> x,
                                          const StftConfig& cfg,
                                          std::size_t* frames) {
  std::size_t nf = 0;
  const auto framed = FrameSignal(x, cfg, &nf);
  const auto fft = static_cast<std::size_t>(cfg.fft_size);
  const auto nb = static_cast<std::size_t>(cfg.num_bins());
  std::vector<std::complex<double>> out(nf * nb);
  for (std::size_t t = 0; t < nf; ++t) {
    Rfft(std::span<const double>(framed.data() + t * fft, fft),
         std::span<std::complex<double>>(out.data() + t * nb, nb));
  }
  if (frames != nullptr) *frames = nf;
  return out;
}

std::vector<double> WindowSquareEnvelope(std::size_t frames,
                                         const StftConfig& cfg,
                                         std::size_t length) {
  const auto window = HannWindow(cfg.fft_size);
  std::vector<double> env(length, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::ptrdiff_t start = FrameStart(t, cfg);
    for (int j = 0; j < cfg.fft_size; ++j) {
      const std::ptrdiff_t p = start + j;
      if (p < 0 || p >= static_cast<std::ptrdiff_t>(length)) continue;
      env[p] += window[j] * window[j];
    }
  }
  return env;
}

std::vector<double> IstftRaw(std::span<const std::complex<double>> bins,
                             std::size_t frames, const StftConfig& cfg,
                             std::size_t length) {
  const auto fft = static_cast<std::size_t>(cfg.fft_size);
  const auto nb = static_cast<std::size_t>(cfg.num_bins());
  if (bins.size() != frames * nb)
    throw Error(ErrorKind::kShapeMismatch, "istft: bin count does not match");
  const auto window = HannWindow(cfg.fft_size);
  std::vector<double> out(length, 0.0);
  std::vector<double> frame(fft);
  for (std::size_t t = 0; t < frames; ++t) {
    Irfft(bins.subspan(t * nb, nb), frame);
    const std::ptrdiff_t start = FrameStart(t, cfg);
    for (std::size_t j = 0; j < fft; ++j) {
      const std::ptrdiff_t p = start + static_cast<std::ptrdiff_t>(j);
      if (p < 0 || p >= static_cast<std::ptrdiff_t>(length)) continue;
      out[p] += frame[j] * window[j];
    }
  }
  const auto env = WindowSquareEnvelope(frames, cfg, length);
  for (std::size_t i = 0; i < length; ++i)
    out[i] = env[i] > 1e-11 ? out[i] / env[i] : 0.0;
  return out;
}

}  // namespace dsp

Spectrogram Stft(const AudioBuffer& x, const StftConfig& cfg) {
  cfg.Validate();
  ValidateAudio(x);
  Spectrogram s;
  s.config = cfg;
  s.source_rate = x.sample_rate;
  s.bins = dsp::StftRaw(x.samples, cfg, &s.frames);
  return s;
}

AudioBuffer Istft(const Spectrogram& s, std::optional<std::size_t> length) {
  s.config.Validate();
  if (s.bins.size() != s.frames * s.num_bins())
    throw Error(ErrorKind::kShapeMismatch,
                "spectrogram bins inconsistent with its config");
  const std::size_t full = dsp::IstftLength(s.frames, s.config);
  const std::size_t n = length.value_or(full);
  auto samples = dsp::IstftRaw(s.bins, s.frames, s.config, std::min(n, full));
  samples.resize(n, 0.0);
  return AudioBuffer(std::move(samples), s.source_rate);
}

}  // namespace fse
