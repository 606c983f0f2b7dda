// include/fse/dsp/stft_json.h

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

#ifndef FSE_DSP_STFT_JSON_H_
#define FSE_DSP_STFT_JSON_H_

#include "fse/dsp/stft.h"
#include "json.hpp"

namespace fse {

inline void to_json(nlohmann::json& j, const StftConfig& c) {
  j = {{"fft_size", c.fft_size},
       {"hop_size", c.hop_size},
       {"window", "hann"},
       {"center_padding", c.center_padding}};
}

inline void from_json(const nlohmann::json& j, StftConfig& c) {
  c.fft_size = j.value("fft_size", c.fft_size);
  c.hop_size = j.value("hop_size", c.hop_size);
  c.center_padding = j.value("center_padding", c.center_padding);
}

}  // namespace fse

#endif  // FSE_DSP_STFT_JSON_H_
