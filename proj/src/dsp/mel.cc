// src/dsp/mel.cc

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

#include "fse/dsp/mel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fse/error.h"

namespace fse {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank MelFilterbank::Build(int n_mels, int fft_size, int sample_rate,
                                   double f_min, double f_max) {
  if (f_max < 0) f_max = sample_rate / 2.0;
  if (n_mels <= 0 || fft_size <= 0 || sample_rate <= 0)
    throw Error(ErrorKind::kInvalidParameter, "mel: non-positive size");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0))
    throw Error(ErrorKind::kInvalidParameter, "mel: need f_min < f_max <= sr/2");

  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.f_min = f_min;
  fb.f_max = f_max;
  fb.fft_size = fft_size;
  fb.sample_rate = sample_rate;
  const int nb = fft_size / 2 + 1;
  fb.weights = Matrix(n_mels, nb);

  const double mel_lo = HzToMel(f_min);
  const double mel_hi = HzToMel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    bool any = false;
    for (int k = 0; k < nb; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fb.weights(m, k) = w;
      any = any || w > 0.0;
    }
    if (!any)
      throw Error(ErrorKind::kInvalidParameter,
                  "mel filter " + std::to_string(m) +
                      " has no support at this FFT size");
  }
  return fb;
}

Matrix MelSpectrogram(const AudioBuffer& x, const StftConfig& cfg,
                      const MelFilterbank& fb) {
  if (fb.fft_size != cfg.fft_size)
    throw Error(ErrorKind::kShapeMismatch, "mel: fft size mismatch");
  if (fb.sample_rate != x.sample_rate)
    throw Error(ErrorKind::kRateMismatch, "mel: sample rate mismatch");
  const Spectrogram s = Stft(x, cfg);
  const std::size_t nb = s.num_bins();
  Matrix out(s.frames, fb.n_mels);
  std::vector<double> power(nb);
  for (std::size_t t = 0; t < s.frames; ++t) {
    for (std::size_t k = 0; k < nb; ++k) power[k] = std::norm(s.at(t, k));
    for (int m = 0; m < fb.n_mels; ++m) {
      double acc = 0.0;
      const double* w = fb.weights.data.data() + m * nb;
      for (std::size_t k = 0; k < nb; ++k) acc += w[k] * power[k];
      out(t, m) = std::log(acc + kLogMelFloor);
    }
  }
  return out;
}

}  // namespace fse
