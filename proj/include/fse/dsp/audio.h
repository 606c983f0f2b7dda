// include/fse/dsp/audio.h

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

#ifndef FSE_DSP_AUDIO_H_
#define FSE_DSP_AUDIO_H_

#include <cstddef>
#include <vector>

namespace fse {

/// Mono sample sequence plus its sample rate. Amplitudes are nominally in
/// [-1, 1]; values must be finite.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

/// Row-major dense real matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

bool AllFinite(const std::vector<double>& v);

/// Throws InvalidSignal on NaN/Inf and DegenerateInput when empty and
/// `allow_empty` is false.
void ValidateAudio(const AudioBuffer& x, bool allow_empty = false);

double Energy(const std::vector<double>& v);
double MeanPower(const std::vector<double>& v);
double PeakAbs(const std::vector<double>& v);

}  // namespace fse

#endif  // FSE_DSP_AUDIO_H_
