// include/fse/encoder/encoder.h

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

#ifndef FSE_ENCODER_ENCODER_H_
#define FSE_ENCODER_ENCODER_H_

#include <memory>
#include <optional>
#include <vector>

#include "fse/dsp/audio.h"
#include "fse/nn/layers.h"
#include "fse/nn/train.h"
#include "json.hpp"

namespace fse::encoder {

struct EncoderConfig {
  std::size_t conv_channels = 64;
  /// Per-layer stride of the CNN front-end; each kernel equals its stride,
  /// so frames never overlap. The product must equal frame_hop.
  std::vector<std::size_t> conv_strides = {5, 4, 4, 4};
  std::size_t n_transformer_layers = 4;
  std::size_t d_model = 192;
  std::size_t n_heads = 4;
  std::size_t ffn_dim = 768;
  std::size_t pos_conv_kernel = 15;  // odd
  std::size_t frame_hop = 320;
  std::uint64_t seed = 1;

  /// Throws ConfigError when the config cannot be built.
  void Validate() const;
  static EncoderConfig Toy() { return {}; }
  static EncoderConfig FullSize();
  bool operator==(const EncoderConfig&) const = default;
};

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);

/// First-layer (acoustic) and last-layer (phonetic) taps, each [F, d_model].
struct EncoderTaps {
  nn::Tensor acoustic;
  nn::Tensor phonetic;
};

/// The three frame-aligned streams of the generative branch. r_a stays
/// undefined until the adapter has run.
struct RepresentationBundle {
  nn::Tensor r_a0;
  nn::Tensor r_p;
  nn::Tensor r_a;

  std::size_t frames() const { return r_p.dim(0); }
};

class Encoder : public nn::Module {
 public:
  explicit Encoder(const EncoderConfig& cfg);

  const EncoderConfig& config() const { return cfg_; }
  /// ceil(n / frame_hop).
  std::size_t NumFrames(std::size_t n) const;

  /// Differentiable forward on a 16 kHz waveform [N]. `flags`, when given,
  /// must have NumFrames(N) entries; flagged CNN frames are replaced by the
  /// masked embedding.
  EncoderTaps Forward(const nn::Tensor& wav,
                      const std::vector<bool>* flags = nullptr) const;

  /// Inference entry point. Errors: RateMismatch unless 16 kHz;
  /// ShapeMismatch on a flag-count mismatch; InvalidSignal/DegenerateInput
  /// for bad audio.
  RepresentationBundle Encode(const AudioBuffer& x,
                              const std::optional<std::vector<bool>>& flags =
                                  std::nullopt) const;

  const nn::Tensor& masked_embedding() const { return mask_emb_; }

 private:
  EncoderConfig cfg_;
  nn::Initializer init_;
  std::vector<std::unique_ptr<nn::Conv1dLayer>> convs_;
  std::vector<std::unique_ptr<nn::LayerNormLayer>> conv_norms_;
  nn::LayerNormLayer feat_norm_;
  nn::LinearLayer feat_proj_;
  nn::Tensor mask_emb_;
  nn::Conv1dLayer pos_conv_;
  std::vector<std::unique_ptr<nn::TransformerLayer>> layers_;
};

/// Sum over both taps of the mean squared error.
/// Errors: ShapeMismatch.
nn::Tensor DistillLoss(const EncoderTaps& student, const EncoderTaps& teacher);

struct EncoderTrainPair {
  AudioBuffer clean;
  AudioBuffer degraded;
  /// Per-frame loss flags; when empty they are detected from `degraded`.
  std::vector<bool> flags;
};

/// Representation distillation: the student starts as a copy of the
/// teacher, sees degraded audio, and regresses the frozen teacher's taps on
/// the paired clean audio. Without a teacher checkpoint the teacher is the
/// seeded random initialization.
/// Errors: NoData on an empty stream; ConfigMismatch when the teacher
/// checkpoint does not fit the config.
nn::TrainResult TrainEncoder(const std::vector<EncoderTrainPair>& pairs,
                             const EncoderConfig& cfg,
                             const nn::TrainOptions& opt,
                             const nn::Checkpoint* teacher = nullptr);

/// Rebuilds an encoder from a checkpoint (config and weights).
std::unique_ptr<Encoder> LoadEncoder(const nn::Checkpoint& ckpt);

}  // namespace fse::encoder

#endif  // FSE_ENCODER_ENCODER_H_
