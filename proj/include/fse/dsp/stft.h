// include/fse/dsp/stft.h

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

#ifndef FSE_DSP_STFT_H_
#define FSE_DSP_STFT_H_

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fse/dsp/audio.h"

namespace fse {

enum class WindowType { kHann };

struct StftConfig {
  int fft_size = 1280;
  int hop_size = 320;
  WindowType window = WindowType::kHann;
  bool center_padding = true;

  int num_bins() const { return fft_size / 2 + 1; }

  /// Throws InvalidParameter unless fft_size > 0, 0 < hop <= fft and the
  /// periodic Hann window is COLA at this hop (fft_size / hop integer >= 2).
  void Validate() const;

  bool operator==(const StftConfig&) const = default;

  /// 1280-point FFT, hop 320, centred Hann: the 16 kHz analysis grid shared
  /// by the encoder frames and the vocoder head.
  static StftConfig Canonical() { return StftConfig{}; }
};

/// Complex spectrogram, row-major [frames x bins].
struct Spectrogram {
  std::size_t frames = 0;
  std::vector<std::complex<double>> bins;
  StftConfig config;
  int source_rate = 16000;

  std::size_t num_bins() const {
    return static_cast<std::size_t>(config.num_bins());
  }
  std::complex<double>& at(std::size_t t, std::size_t k) {
    return bins[t * num_bins() + k];
  }
  const std::complex<double>& at(std::size_t t, std::size_t k) const {
    return bins[t * num_bins() + k];
  }
};

namespace dsp {

/// Periodic Hann window: w[n] = 0.5 - 0.5 cos(2 pi n / N).
std::vector<double> HannWindow(int n);

/// ceil(n / hop) with centre padding, otherwise the number of full frames.
std::size_t FrameCount(std::size_t n, const StftConfig& cfg);

/// Output length of the overlap-add inverse before any trimming.
std::size_t IstftLength(std::size_t frames, const StftConfig& cfg);

/// Offset (in signal samples) of the first sample of frame t.
std::ptrdiff_t FrameStart(std::size_t t, const StftConfig& cfg);

/// Maps an out-of-range index onto [0, n) by mirror reflection about the
/// end samples (edge excluded), repeating for pads longer than the signal.
std::size_t ReflectIndex(std::ptrdiff_t i, std::size_t n);

/// Windowed frames, row-major [frames x fft_size], with reflection padding.
std::vector<double> FrameSignal(std::span<const double> x,
                                const StftConfig& cfg, std::size_t* frames);

/// STFT on raw samples; returns row-major [frames x bins].
std::vector<std::complex<double>> StftRaw(std::span<const double> x,
                                          const StftConfig& cfg,
                                          std::size_t* frames);

/// Sum over frames of the squared window at every output position.
std::vector<double> WindowSquareEnvelope(std::size_t frames,
                                         const StftConfig& cfg,
                                         std::size_t length);

/// Weighted overlap-add inverse on raw bins; output trimmed to `length`.
std::vector<double> IstftRaw(std::span<const std::complex<double>> bins,
                             std::size_t frames, const StftConfig& cfg,
                             std::size_t length);

}  // namespace dsp

/// Errors: DegenerateInput on empty input, InvalidSignal on NaN/Inf.
Spectrogram Stft(const AudioBuffer& x, const StftConfig& cfg);

/// Overlap-add inverse. Output length is frames * hop for centred configs
/// unless `length` is given, in which case the result is trimmed (or padded
/// with zeros) to exactly that many samples.
AudioBuffer Istft(const Spectrogram& s,
                  std::optional<std::size_t> length = std::nullopt);

}  // namespace fse

#endif  // FSE_DSP_STFT_H_
