// include/fse/dsp/wav.h

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

#ifndef FSE_DSP_WAV_H_
#define FSE_DSP_WAV_H_

#include <filesystem>

#include "fse/dsp/audio.h"

namespace fse {

enum class WavFormat { kPcm16, kPcm24, kFloat32 };

/// Reads a mono RIFF/WAVE file (PCM 16/24-bit or IEEE float 32-bit).
/// Multi-channel files are rejected with an Io error.
AudioBuffer ReadWav(const std::filesystem::path& path);

/// Writes mono audio; integer formats clamp to [-1, 1) before quantising.
void WriteWav(const std::filesystem::path& path, const AudioBuffer& x,
              WavFormat format = WavFormat::kPcm16);

}  // namespace fse

#endif  // FSE_DSP_WAV_H_
