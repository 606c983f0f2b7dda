// include/fse/predictor/predictor.h

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

#ifndef FSE_PREDICTOR_PREDICTOR_H_
#define FSE_PREDICTOR_PREDICTOR_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fse/degrade/degrade.h"
#include "fse/dsp/audio.h"
#include "fse/dsp/stft.h"
#include "fse/nn/layers.h"
#include "fse/nn/train.h"
#include "json.hpp"

namespace fse::predictor {

struct PredictorConfig {
  std::size_t n_blocks = 2;
  std::size_t lstm_hidden = 64;
  std::size_t emb_dim = 16;
  std::size_t attn_heads = 2;
  StftConfig stft = ToyStft();
  std::uint64_t seed = 31;

  /// fft 512, hop 128 at 16 kHz.
  static StftConfig ToyStft();
  static PredictorConfig Toy() { return {}; }
  static PredictorConfig FullSize();
  /// Errors: ConfigError.
  void Validate() const;
  bool operator==(const PredictorConfig&) const = default;
};

void to_json(nlohmann::json& j, const PredictorConfig& c);
void from_json(const nlohmann::json& j, PredictorConfig& c);

/// Full-band self-attention across frames. Per head, the query, key and
/// value of one frame are the concatenation of that head's slice over all
/// frequency bins. z [T, F, D] -> [T, F, D].
class FullBandAttention : public nn::Module {
 public:
  FullBandAttention(std::size_t dim, std::size_t heads, nn::Initializer& init);
  nn::Tensor operator()(const nn::Tensor& z) const;

 private:
  std::size_t dim_, heads_;
  nn::LinearLayer q_, k_, v_, out_;
};

/// One dual-path block on z [T, F, D]: intra-frequency BiLSTM, intra-time
/// BiLSTM and full-band attention, each pre-normed and residual.
class DualPathBlock : public nn::Module {
 public:
  DualPathBlock(std::size_t dim, std::size_t hidden, std::size_t heads, nn::Initializer& init);
  nn::Tensor operator()(const nn::Tensor& z) const;

 private:
  nn::LayerNormLayer intra_norm_;
  nn::BiLstm intra_lstm_;
  nn::LinearLayer intra_proj_;
  nn::LayerNormLayer inter_norm_;
  nn::BiLstm inter_lstm_;
  nn::LinearLayer inter_proj_;
  nn::LayerNormLayer attn_norm_;
  FullBandAttention attn_;
};

/// Embedding, dual-path blocks and output projection over per-bin
/// features x [T, F, in] -> [T, F, out].
class DualPathCore : public nn::Module {
 public:
  DualPathCore(std::size_t in, std::size_t out, std::size_t blocks, std::size_t dim,
               std::size_t hidden, std::size_t heads, nn::Initializer& init,
               bool zero_init_output);
  nn::Tensor operator()(const nn::Tensor& x) const;

 private:
  nn::LinearLayer embed_;
  std::vector<std::unique_ptr<DualPathBlock>> blocks_;
  nn::LinearLayer out_;
};

/// Complex spectral mapping: S_out = S_in + core(S_in), waveform via istft
/// trimmed to the input length.
class Predictor : public nn::Module {
 public:
  explicit Predictor(const PredictorConfig& cfg, bool zero_init_output = false);
  const PredictorConfig& config() const { return cfg_; }

  /// Differentiable path on a 16 kHz waveform [N]. Errors: ShapeMismatch
  /// when N is below one hop.
  nn::Tensor Forward(const nn::Tensor& wav) const;
  /// Errors: RateMismatch unless 16 kHz; ShapeMismatch as Forward.
  AudioBuffer Predict(const AudioBuffer& x) const;

 private:
  PredictorConfig cfg_;
  nn::Initializer init_;
  DualPathCore core_;
};

/// Mean L1 over real parts + mean L1 over imaginary parts + mean L1 over
/// magnitudes of the canonical (1280/320) STFT. Errors: ShapeMismatch.
nn::LossBreakdown StftDomainLoss(const nn::Tensor& y_hat, const nn::Tensor& y);

struct PredictorTrainPair {
  AudioBuffer clean;
  AudioBuffer degraded;
  /// Sidecar recipe; pairs without one are accepted as-is.
  std::optional<degrade::DegradationRecipe> recipe;
};

/// True when a pair fits the predictor's distortion subset (noise,
/// reverberation, clipping). Otherwise `reason` names the rejected kind.
bool AcceptsRecipe(const std::optional<degrade::DegradationRecipe>& recipe,
                   std::string* reason = nullptr);

/// Rejected pairs are logged as notes at step 0 and skipped.
/// Errors: NoData when no pair survives the filter; ShapeMismatch,
/// RateMismatch for malformed pairs.
nn::TrainResult TrainPredictor(const std::vector<PredictorTrainPair>& pairs,
                               const PredictorConfig& cfg, const nn::TrainOptions& opt);

/// Errors: ConfigMismatch.
std::unique_ptr<Predictor> LoadPredictor(const nn::Checkpoint& ckpt);

}  // namespace fse::predictor

#endif  // FSE_PREDICTOR_PREDICTOR_H_
