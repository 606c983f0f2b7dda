// src/plc/plc.cc

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

#include "fse/plc/plc.h"

#include <algorithm>
#include <string>

#include "fse/error.h"

namespace fse::plc {

std::size_t NumFrames(std::size_t n, std::size_t frame_size) {
  return (n + frame_size - 1) / frame_size;
}

AudioBuffer InjectLoss(const AudioBuffer& x, const LossMask& mask) {
  if (mask.frame_size == 0) throw Error(ErrorKind::kInvalidMask, "frame size 0");
  const std::size_t frames = NumFrames(x.size(), mask.frame_size);
  AudioBuffer out = x;
  for (std::size_t i = 0; i < mask.lost_frames.size(); ++i) {
    const std::size_t f = mask.lost_frames[i];
    if (i > 0 && f <= mask.lost_frames[i - 1])
      throw Error(ErrorKind::kInvalidMask, "lost frames must be strictly increasing");
    if (f >= frames)
      throw Error(ErrorKind::kInvalidMask, "lost frame " + std::to_string(f) +
                                               " outside " + std::to_string(frames) +
                                               " frames");
    const std::size_t begin = f * mask.frame_size;
    const std::size_t end = std::min(x.size(), begin + mask.frame_size);
    std::fill(out.samples.begin() + begin, out.samples.begin() + end, 0.0);
  }
  return out;
}

LossMask DetectLoss(const AudioBuffer& x, std::size_t frame_size,
                    const DetectorConfig& cfg) {
  ValidateAudio(x);
  if (frame_size == 0) throw Error(ErrorKind::kInvalidParameter, "frame size 0");
  const std::size_t frames = NumFrames(x.size(), frame_size);
  std::vector<double> energy(frames, 0.0);
  double mean = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t begin = f * frame_size;
    const std::size_t end = std::min(x.size(), begin + frame_size);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += x.samples[i] * x.samples[i];
    energy[f] = s / static_cast<double>(end - begin);
    mean += energy[f];
  }
  mean /= static_cast<double>(frames);
  const double threshold = std::max(cfg.abs_threshold, cfg.rel_threshold * mean);
  LossMask mask;
  mask.frame_size = frame_size;
  for (std::size_t f = 0; f < frames; ++f)
    if (energy[f] < threshold) mask.lost_frames.push_back(f);
  return mask;
}

std::vector<bool> EmbedMask(const LossMask& mask, std::size_t n_frames) {
  std::vector<bool> flags(n_frames, false);
  for (std::size_t f : mask.lost_frames) {
    if (f >= n_frames)
      throw Error(ErrorKind::kShapeMismatch, "lost frame " + std::to_string(f) +
                                                 " beyond " + std::to_string(n_frames) +
                                                 " frames");
    flags[f] = true;
  }
  return flags;
}

}  // namespace fse::plc
