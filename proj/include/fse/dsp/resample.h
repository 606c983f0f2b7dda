// include/fse/dsp/resample.h

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

#ifndef FSE_DSP_RESAMPLE_H_
#define FSE_DSP_RESAMPLE_H_

#include <memory>
#include <vector>

#include "fse/dsp/audio.h"

namespace fse {

/// Band-limited rational-ratio resampler: Kaiser-windowed sinc with 64 zero
/// crossings per side, evaluated through a polyphase table. The lowpass
/// cutoff sits at `rolloff` times the lower of the two Nyquist rates.
class Resampler {
 public:
  static constexpr int kZeroCrossings = 64;
  static constexpr double kKaiserBeta = 9.0;
  static constexpr double kRolloff = 0.94;

  Resampler(int source_rate, int target_rate);

  int source_rate() const { return source_rate_; }
  int target_rate() const { return target_rate_; }

  /// round(n * target / source) samples.
  std::size_t OutputLength(std::size_t n) const;

  std::vector<double> Process(const std::vector<double>& x) const;

 private:
  int source_rate_;
  int target_rate_;
  long up_;    // L
  long down_;  // M
  long half_taps_;
  std::vector<double> table_;  // [L x (2 * half_taps_ + 1)]
};

/// Errors: InvalidRate when either rate is not positive. Same-rate input is
/// returned unchanged.
AudioBuffer Resample(const AudioBuffer& x, int target_rate);

}  // namespace fse

#endif  // FSE_DSP_RESAMPLE_H_
