// src/gen/models.cc

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

#include "fse/gen/models.h"

#include <cmath>

#include "fse/dsp/stft_json.h"
#include "fse/error.h"

namespace fse::gen {
namespace {

nn::Conv1dOptions Same7() {
  nn::Conv1dOptions o;
  o.pad_left = o.pad_right = 3;
  return o;
}

// [F, D] -> [1, D, F] and back, for convolutions over frames.
nn::Tensor ToChannels(const nn::Tensor& x) {
  return nn::Reshape(nn::Permute(x, {1, 0}), {1, x.dim(1), x.dim(0)});
}
nn::Tensor FromChannels(const nn::Tensor& x) {
  return nn::Permute(nn::Reshape(x, {x.dim(1), x.dim(2)}), {1, 0});
}

}  // namespace

void BackboneConfig::Validate() const {
  if (input_dim == 0 || hidden_dim == 0 || n_blocks == 0 || intermediate_dim == 0)
    throw Error(ErrorKind::kConfigError, "backbone sizes must be positive");
  if (has_istft_head) {
    if (!istft_cfg) throw Error(ErrorKind::kConfigError, "iSTFT head needs an istft config");
    istft_cfg->Validate();
  }
}

BackboneConfig BackboneConfig::ToyAdapter() { return BackboneConfig{}; }

BackboneConfig BackboneConfig::ToyVocoder() {
  BackboneConfig c;
  c.has_istft_head = true;
  c.istft_cfg = StftConfig::Canonical();
  c.seed = 12;
  return c;
}

BackboneConfig BackboneConfig::FullAdapter() {
  BackboneConfig c;
  c.input_dim = 1024;
  c.hidden_dim = 1024;
  c.n_blocks = 12;
  c.intermediate_dim = 3072;
  return c;
}

BackboneConfig BackboneConfig::FullVocoder() {
  BackboneConfig c = FullAdapter();
  c.has_istft_head = true;
  c.istft_cfg = StftConfig::Canonical();
  c.seed = 12;
  return c;
}

void to_json(nlohmann::json& j, const BackboneConfig& c) {
  j = {{"input_dim", c.input_dim},         {"hidden_dim", c.hidden_dim},
       {"n_blocks", c.n_blocks},           {"intermediate_dim", c.intermediate_dim},
       {"has_istft_head", c.has_istft_head}, {"seed", c.seed}};
  j["istft_cfg"] = c.istft_cfg ? nlohmann::json(*c.istft_cfg) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, BackboneConfig& c) {
  c.input_dim = j.value("input_dim", c.input_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.n_blocks = j.value("n_blocks", c.n_blocks);
  c.intermediate_dim = j.value("intermediate_dim", c.intermediate_dim);
  c.has_istft_head = j.value("has_istft_head", c.has_istft_head);
  c.seed = j.value("seed", c.seed);
  if (j.contains("istft_cfg") && !j["istft_cfg"].is_null())
    c.istft_cfg = j["istft_cfg"].get<StftConfig>();
  else
    c.istft_cfg.reset();
}

Backbone::Backbone(const BackboneConfig& cfg, nn::Initializer& init)
    : embed_(cfg.input_dim, cfg.hidden_dim, 7, Same7(), init),
      embed_norm_(cfg.hidden_dim),
      final_norm_(cfg.hidden_dim) {
  AddModule("embed", embed_);
  AddModule("embed_norm", embed_norm_);
  const double scale = 1.0 / static_cast<double>(cfg.n_blocks);
  for (std::size_t i = 0; i < cfg.n_blocks; ++i) {
    blocks_.push_back(std::make_unique<nn::ConvNeXtBlock>(cfg.hidden_dim,
                                                          cfg.intermediate_dim, scale, init));
    AddModule("block" + std::to_string(i), *blocks_.back());
  }
  AddModule("final_norm", final_norm_);
}

nn::Tensor Backbone::operator()(const nn::Tensor& x) const {
  nn::Tensor h = embed_norm_(FromChannels(embed_(ToChannels(x))));
  for (const auto& b : blocks_) h = (*b)(h);
  return final_norm_(h);
}

Adapter::Adapter(const BackboneConfig& cfg)
    : cfg_((cfg.Validate(), cfg)), init_(cfg.seed), backbone_(cfg, init_),
      out_(cfg.hidden_dim, cfg.input_dim, init_) {
  if (cfg.has_istft_head) throw Error(ErrorKind::kConfigError, "adapter has no iSTFT head");
  AddModule("backbone", backbone_);
  AddModule("out", out_);
}

nn::Tensor Adapter::FuseInputs(const nn::Tensor& r_p, const nn::Tensor& r_a0) {
  if (r_p.shape() != r_a0.shape() || r_p.rank() != 2)
    throw Error(ErrorKind::kShapeMismatch, "R_P " + nn::ShapeString(r_p.shape()) +
                                               " and R_A0 " + nn::ShapeString(r_a0.shape()) +
                                               " must share a [frames, dim] shape");
  return nn::Add(r_p, r_a0);
}

nn::Tensor Adapter::Forward(const nn::Tensor& fused) const {
  if (fused.rank() != 2 || fused.dim(1) != cfg_.input_dim)
    throw Error(ErrorKind::kShapeMismatch, "adapter input must be [frames, " +
                                               std::to_string(cfg_.input_dim) + "]");
  return out_(backbone_(fused));
}

Vocoder::Vocoder(const BackboneConfig& cfg, bool zero_init_head)
    : cfg_((cfg.Validate(), cfg)), init_(cfg.seed), backbone_(cfg, init_),
      head_(cfg.hidden_dim, 3 * static_cast<std::size_t>(cfg.istft_cfg ? cfg.istft_cfg->num_bins() : 1),
            init_, true, zero_init_head) {
  if (!cfg.has_istft_head) throw Error(ErrorKind::kConfigError, "vocoder needs an iSTFT head");
  AddModule("backbone", backbone_);
  AddModule("head", head_);
}

nn::Tensor Vocoder::Spectrum(const nn::Tensor& r_a) const {
  using namespace nn;
  if (r_a.rank() != 2 || r_a.dim(1) != cfg_.input_dim)
    throw Error(ErrorKind::kShapeMismatch, "vocoder input must be [frames, " +
                                               std::to_string(cfg_.input_dim) + "]");
  const std::size_t frames = r_a.dim(0);
  const auto bins = static_cast<std::size_t>(cfg_.istft_cfg->num_bins());
  Tensor h = head_(backbone_(r_a));  // [F, 3 * bins]
  Tensor logmag = Slice(h, 1, 0, bins);
  Tensor p_re = Slice(h, 1, bins, bins);
  Tensor p_im = Slice(h, 1, 2 * bins, bins);
  Tensor mag = Exp(Scale(Tanh(Scale(logmag, 1.0 / kMaxLogMagnitude)), kMaxLogMagnitude));
  Tensor inv_norm = Div(mag, Sqrt(AddScalar(Add(Square(p_re), Square(p_im)), 1e-8)));
  Tensor re = Reshape(Mul(p_re, inv_norm), {frames, bins, 1});
  Tensor im = Reshape(Mul(p_im, inv_norm), {frames, bins, 1});
  return Concat({re, im}, 2);
}

nn::Tensor Vocoder::Forward(const nn::Tensor& r_a) const {
  const auto& cfg = *cfg_.istft_cfg;
  return nn::IstftOp(Spectrum(r_a), cfg, r_a.dim(0) * static_cast<std::size_t>(cfg.hop_size));
}

AudioBuffer Vocoder::Vocode(const nn::Tensor& r_a) const {
  for (double v : r_a.values())
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidSignal, "non-finite representation");
  nn::NoGradGuard ng;
  return AudioBuffer(Forward(r_a).ToVector(), 16000);
}

}  // namespace fse::gen
