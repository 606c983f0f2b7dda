// include/fse/gen/train.h

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

#ifndef FSE_GEN_TRAIN_H_
#define FSE_GEN_TRAIN_H_

#include <memory>
#include <vector>

#include "fse/encoder/encoder.h"
#include "fse/gen/gan.h"
#include "fse/gen/models.h"
#include "fse/nn/train.h"

namespace fse::gen {

struct GenTrainConfig {
  BackboneConfig model;
  DiscriminatorSuiteConfig disc;
  GanLossWeights weights;

  static GenTrainConfig ToyAdapter();
  static GenTrainConfig ToyVocoder();
  bool operator==(const GenTrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const GenTrainConfig& c);
void from_json(const nlohmann::json& j, GenTrainConfig& c);

/// Vocoder stage: clean speech only. Inputs are the frozen encoder's
/// acoustic tap on each clean utterance, targets the utterance itself
/// (zero-padded to frames * hop). Generator and discriminator updates
/// alternate 1:1; the tracked loss is the unweighted mel term.
/// Errors: MissingDependency without an encoder checkpoint; NoData;
/// ConfigMismatch when widths disagree with the encoder.
nn::TrainResult TrainVocoder(const std::vector<AudioBuffer>& clean,
                             const nn::Checkpoint* encoder_ckpt, const GenTrainConfig& cfg,
                             const nn::TrainOptions& opt);

/// Adapter stage: (degraded, clean) pairs through the frozen encoder. The
/// adapter maps (R_P, R_A0) of the degraded input onto R_A0 of the clean
/// input; the tracked loss is the MSE term.
/// Errors: as TrainVocoder.
nn::TrainResult TrainAdapter(const std::vector<encoder::EncoderTrainPair>& pairs,
                             const nn::Checkpoint* encoder_ckpt, const GenTrainConfig& cfg,
                             const nn::TrainOptions& opt);

/// encode (with loss flags) -> adapt -> vocode, trimmed to the input
/// length. Flags are detected from `x` when absent.
/// Errors: RateMismatch unless 16 kHz; ConfigMismatch on width mismatch.
AudioBuffer RunGenerativeBranch(const encoder::Encoder& enc, const Adapter& adapter,
                                const Vocoder& vocoder, const AudioBuffer& x,
                                const std::optional<std::vector<bool>>& flags = std::nullopt);

/// Errors: ConfigMismatch when the checkpoint is of another kind or shape.
std::unique_ptr<Adapter> LoadAdapter(const nn::Checkpoint& ckpt);
std::unique_ptr<Vocoder> LoadVocoder(const nn::Checkpoint& ckpt);

}  // namespace fse::gen

#endif  // FSE_GEN_TRAIN_H_
