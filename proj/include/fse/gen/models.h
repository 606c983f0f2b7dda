// include/fse/gen/models.h

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

#ifndef FSE_GEN_MODELS_H_
#define FSE_GEN_MODELS_H_

#include <memory>
#include <optional>
#include <vector>

#include "fse/dsp/audio.h"
#include "fse/dsp/stft.h"
#include "fse/nn/layers.h"
#include "json.hpp"

namespace fse::gen {

struct BackboneConfig {
  std::size_t input_dim = 192;  // width of the incoming representations
  std::size_t hidden_dim = 192;
  std::size_t n_blocks = 4;
  std::size_t intermediate_dim = 576;
  bool has_istft_head = false;
  std::optional<StftConfig> istft_cfg;
  std::uint64_t seed = 11;

  void Validate() const;
  static BackboneConfig ToyAdapter();
  static BackboneConfig ToyVocoder();
  static BackboneConfig FullAdapter();
  static BackboneConfig FullVocoder();
  bool operator==(const BackboneConfig&) const = default;
};

void to_json(nlohmann::json& j, const BackboneConfig& c);
void from_json(const nlohmann::json& j, BackboneConfig& c);

/// ConvNeXt-1D stack over frames: embedding conv (k=7), LayerNorm,
/// n_blocks ConvNeXt blocks, final LayerNorm. x [F, input_dim] ->
/// [F, hidden_dim].
class Backbone : public nn::Module {
 public:
  Backbone(const BackboneConfig& cfg, nn::Initializer& init);
  nn::Tensor operator()(const nn::Tensor& x) const;

 private:
  nn::Conv1dLayer embed_;
  nn::LayerNormLayer embed_norm_;
  std::vector<std::unique_ptr<nn::ConvNeXtBlock>> blocks_;
  nn::LayerNormLayer final_norm_;
};

/// Maps R_P to R_A conditioned on R_A0 by element-wise addition at the input.
class Adapter : public nn::Module {
 public:
  explicit Adapter(const BackboneConfig& cfg);

  const BackboneConfig& config() const { return cfg_; }
  /// R_P + R_A0. Errors: ShapeMismatch.
  static nn::Tensor FuseInputs(const nn::Tensor& r_p, const nn::Tensor& r_a0);
  /// Backbone and output projection applied to an already fused input.
  nn::Tensor Forward(const nn::Tensor& fused) const;
  nn::Tensor Adapt(const nn::Tensor& r_p, const nn::Tensor& r_a0) const {
    return Forward(FuseInputs(r_p, r_a0));
  }

 private:
  BackboneConfig cfg_;
  nn::Initializer init_;
  Backbone backbone_;
  nn::LinearLayer out_;
};

/// Backbone plus iSTFT head. The head emits per bin a log-magnitude and
/// an unnormalized phasor (p_re, p_im); magnitude is
/// exp(L tanh(m / L)) with L = ln(100), and the complex bin is
/// magnitude * (p_re, p_im) / sqrt(p_re^2 + p_im^2 + 1e-8).
class Vocoder : public nn::Module {
 public:
  static constexpr double kMaxLogMagnitude = 4.605170185988092;  // ln(100)

  explicit Vocoder(const BackboneConfig& cfg, bool zero_init_head = false);

  const BackboneConfig& config() const { return cfg_; }
  const StftConfig& istft_config() const { return *cfg_.istft_cfg; }
  /// Differentiable path: R_A [F, input_dim] -> waveform [F * hop].
  nn::Tensor Forward(const nn::Tensor& r_a) const;
  /// Complex spectrum [F, bins, 2] emitted by the head.
  nn::Tensor Spectrum(const nn::Tensor& r_a) const;
  /// Errors: InvalidSignal on non-finite input; ShapeMismatch on width.
  AudioBuffer Vocode(const nn::Tensor& r_a) const;

 private:
  BackboneConfig cfg_;
  nn::Initializer init_;
  Backbone backbone_;
  nn::LinearLayer head_;
};

}  // namespace fse::gen

#endif  // FSE_GEN_MODELS_H_
