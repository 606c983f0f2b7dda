// src/dsp/audio.cc

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

#include "fse/dsp/audio.h"

#include <algorithm>
#include <cmath>

#include "fse/error.h"

namespace fse {

bool AllFinite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double s) { return std::isfinite(s); });
}

void ValidateAudio(const AudioBuffer& x, bool allow_empty) {
  if (x.sample_rate <= 0)
    throw Error(ErrorKind::kInvalidRate, "sample rate must be positive");
  if (!allow_empty && x.empty())
    throw Error(ErrorKind::kDegenerateInput, "empty audio buffer");
  if (!AllFinite(x.samples))
    throw Error(ErrorKind::kInvalidSignal, "non-finite sample");
}

double Energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double s : v) e += s * s;
  return e;
}

double MeanPower(const std::vector<double>& v) {
  return v.empty() ? 0.0 : Energy(v) / static_cast<double>(v.size());
}

double PeakAbs(const std::vector<double>& v) {
  double p = 0.0;
  for (double s : v) p = std::max(p, std::abs(s));
  return p;
}

}  // namespace fse
