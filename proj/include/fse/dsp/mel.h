// include/fse/dsp/mel.h

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

#ifndef FSE_DSP_MEL_H_
#define FSE_DSP_MEL_H_

#include "fse/dsp/audio.h"
#include "fse/dsp/stft.h"

namespace fse {

/// Triangular filters on the HTK mel scale, evaluated at the STFT bin
/// centre frequencies. weights is [n_mels x (fft_size/2 + 1)].
struct MelFilterbank {
  int n_mels = 0;
  double f_min = 0.0;
  double f_max = 0.0;
  int fft_size = 0;
  int sample_rate = 0;
  Matrix weights;

  /// Throws InvalidParameter when the band is invalid or any filter ends
  /// up without a nonzero weight (too many mels for the FFT resolution).
  static MelFilterbank Build(int n_mels, int fft_size, int sample_rate,
                             double f_min = 0.0, double f_max = -1.0);
};

inline constexpr double kLogMelFloor = 1e-5;

double HzToMel(double hz);
double MelToHz(double mel);

/// log(fb * |STFT|^2 + 1e-5), shape [frames x n_mels].
Matrix MelSpectrogram(const AudioBuffer& x, const StftConfig& cfg,
                      const MelFilterbank& fb);

}  // namespace fse

#endif  // FSE_DSP_MEL_H_
