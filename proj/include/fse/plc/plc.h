// include/fse/plc/plc.h

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

#ifndef FSE_PLC_PLC_H_
#define FSE_PLC_PLC_H_

#include <cstddef>
#include <vector>

#include "fse/dsp/audio.h"

namespace fse::plc {

/// Frame-level loss pattern. Frames tile the signal from sample 0 with no
/// overlap; the default size equals the encoder hop at 16 kHz.
struct LossMask {
  std::size_t frame_size = 320;
  std::vector<std::size_t> lost_frames;  // strictly increasing

  bool operator==(const LossMask&) const = default;
};

struct DetectorConfig {
  double abs_threshold = 1e-10;
  double rel_threshold = 1e-6;
};

/// Zeroes every sample of each lost frame (the last frame may be partial).
/// Errors: InvalidMask for unsorted, duplicate or out-of-range indices.
AudioBuffer InjectLoss(const AudioBuffer& x, const LossMask& mask);

/// Flags frames whose mean-square energy falls below
/// max(abs_threshold, rel_threshold * mean frame energy).
/// Errors: DegenerateInput on empty input.
LossMask DetectLoss(const AudioBuffer& x, std::size_t frame_size = 320,
                    const DetectorConfig& cfg = {});

/// Per-frame substitution flags of length n_frames.
/// Errors: ShapeMismatch when a lost index is >= n_frames.
std::vector<bool> EmbedMask(const LossMask& mask, std::size_t n_frames);

/// Number of frames covering n samples: ceil(n / frame_size).
std::size_t NumFrames(std::size_t n, std::size_t frame_size);

}  // namespace fse::plc

#endif  // FSE_PLC_PLC_H_
