// include/fse/pipeline/data.h

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

#ifndef FSE_PIPELINE_DATA_H_
#define FSE_PIPELINE_DATA_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fse/curation/curation.h"
#include "fse/degrade/degrade.h"
#include "fse/pipeline/config.h"

namespace fse::pipeline {

/// Voiced harmonic source with a gliding pitch, two moving formant
/// resonances, syllable-rate envelope and a breath-noise floor.
AudioBuffer SyntheticSpeech(std::size_t n, int rate, std::uint64_t seed);

struct CleanUtterance {
  std::string id;
  AudioBuffer clean48;  // 48 kHz, length a multiple of 3
};

/// Clean training utterances. With a manifest, entries not dropped by
/// curation are read, resampled to 48 kHz and cut or zero-padded to
/// segment_s; otherwise SyntheticSpeech is used.
/// Errors: Io; NoData when the manifest keeps nothing.
std::vector<CleanUtterance> LoadCleanCorpus(const DataConfig& cfg);

/// Noise for utterance `index`: a file from noise_dir (cycled, resampled)
/// or seeded Gaussian noise, `n` samples at `rate`.
AudioBuffer NoiseFor(const DataConfig& cfg, std::size_t index, std::size_t n, int rate);

struct SimulatedPair {
  std::string id;
  AudioBuffer clean16;
  AudioBuffer degraded16;
  degrade::DegradationRecipe recipe;
  AudioBuffer clean48;
};

/// One degraded 16 kHz rendition per clean utterance, recipe drawn from the
/// sampler with seed data.seed + index.
std::vector<SimulatedPair> SimulatePairs(const DataConfig& cfg);

/// Writes <id>_clean.wav, <id>_degraded.wav and <id>.json (recipe sidecar)
/// under `dir`, and returns the pairs.
std::vector<SimulatedPair> Simulate(const DataConfig& cfg, const std::filesystem::path& dir);

/// FNV-1a over the samples of every pair.
std::string DataHash(const std::vector<SimulatedPair>& pairs);

}  // namespace fse::pipeline

#endif  // FSE_PIPELINE_DATA_H_
