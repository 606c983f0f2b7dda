// src/encoder/encoder.cc

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

#include "fse/encoder/encoder.h"

#include <numeric>

#include "fse/error.h"
#include "fse/nn/optim.h"
#include "fse/plc/plc.h"

namespace fse::encoder {
namespace {

nn::Conv1dOptions Strided(std::size_t s) {
  nn::Conv1dOptions o;
  o.stride = s;
  return o;
}

nn::Conv1dOptions PosConv(const EncoderConfig& c) {
  nn::Conv1dOptions o;
  o.pad_left = o.pad_right = c.pos_conv_kernel / 2;
  o.groups = c.d_model;
  return o;
}

}  // namespace

void EncoderConfig::Validate() const {
  if (conv_channels == 0 || conv_strides.empty() || n_transformer_layers == 0 ||
      d_model == 0 || n_heads == 0 || ffn_dim == 0)
    throw Error(ErrorKind::kConfigError, "encoder sizes must be positive");
  if (d_model % n_heads != 0)
    throw Error(ErrorKind::kConfigError, "d_model must be divisible by n_heads");
  const std::size_t total = std::accumulate(conv_strides.begin(), conv_strides.end(),
                                            std::size_t{1}, std::multiplies<>());
  if (total != frame_hop || frame_hop != 320)
    throw Error(ErrorKind::kConfigError, "CNN strides must multiply to a 320-sample hop");
  if (pos_conv_kernel % 2 == 0)
    throw Error(ErrorKind::kConfigError, "positional kernel must be odd");
}

EncoderConfig EncoderConfig::FullSize() {
  EncoderConfig c;
  c.conv_channels = 512;
  c.conv_strides = {5, 2, 2, 2, 2, 2, 2};
  c.n_transformer_layers = 24;
  c.d_model = 1024;
  c.n_heads = 16;
  c.ffn_dim = 4096;
  c.pos_conv_kernel = 127;
  return c;
}

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = {{"conv_channels", c.conv_channels},   {"conv_strides", c.conv_strides},
       {"n_transformer_layers", c.n_transformer_layers},
       {"d_model", c.d_model},               {"n_heads", c.n_heads},
       {"ffn_dim", c.ffn_dim},               {"pos_conv_kernel", c.pos_conv_kernel},
       {"frame_hop", c.frame_hop},           {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  c.conv_channels = j.value("conv_channels", c.conv_channels);
  c.conv_strides = j.value("conv_strides", c.conv_strides);
  c.n_transformer_layers = j.value("n_transformer_layers", c.n_transformer_layers);
  c.d_model = j.value("d_model", c.d_model);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
  c.pos_conv_kernel = j.value("pos_conv_kernel", c.pos_conv_kernel);
  c.frame_hop = j.value("frame_hop", c.frame_hop);
  c.seed = j.value("seed", c.seed);
}

Encoder::Encoder(const EncoderConfig& cfg)
    : cfg_((cfg.Validate(), cfg)),
      init_(cfg.seed),
      feat_norm_(cfg.conv_channels),
      feat_proj_(cfg.conv_channels, cfg.d_model, init_),
      pos_conv_(cfg.d_model, cfg.d_model, cfg.pos_conv_kernel, PosConv(cfg), init_) {
  auto& init = init_;
  std::size_t in = 1;
  for (std::size_t i = 0; i < cfg.conv_strides.size(); ++i) {
    const std::size_t s = cfg.conv_strides[i];
    convs_.push_back(std::make_unique<nn::Conv1dLayer>(in, cfg.conv_channels, s,
                                                       Strided(s), init, false));
    conv_norms_.push_back(std::make_unique<nn::LayerNormLayer>(cfg.conv_channels));
    AddModule("conv" + std::to_string(i), *convs_.back());
    AddModule("conv_norm" + std::to_string(i), *conv_norms_.back());
    in = cfg.conv_channels;
  }
  AddModule("feat_norm", feat_norm_);
  AddModule("feat_proj", feat_proj_);
  mask_emb_ = AddParameter("mask_emb", init.Uniform({cfg.d_model}, 0.5));
  AddModule("pos_conv", pos_conv_);
  for (std::size_t i = 0; i < cfg.n_transformer_layers; ++i) {
    layers_.push_back(std::make_unique<nn::TransformerLayer>(cfg.d_model, cfg.n_heads,
                                                             cfg.ffn_dim, init));
    AddModule("layer" + std::to_string(i), *layers_.back());
  }
}

std::size_t Encoder::NumFrames(std::size_t n) const {
  return (n + cfg_.frame_hop - 1) / cfg_.frame_hop;
}

EncoderTaps Encoder::Forward(const nn::Tensor& wav,
                             const std::vector<bool>* flags) const {
  using namespace nn;
  if (wav.rank() != 1 || wav.numel() == 0)
    throw Error(ErrorKind::kShapeMismatch, "encoder expects a non-empty [N] waveform");
  const std::size_t frames = NumFrames(wav.numel());
  if (flags && flags->size() != frames)
    throw Error(ErrorKind::kShapeMismatch,
                "loss flags have " + std::to_string(flags->size()) + " entries, expected " +
                    std::to_string(frames));
  const std::size_t padded = frames * cfg_.frame_hop;
  Tensor h = Reshape(Pad(wav, 0, padded - wav.numel(), PadMode::kZero), {1, 1, padded});
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    h = (*convs_[i])(h);  // [1, C, T]
    const std::size_t c = h.dim(1), t = h.dim(2);
    Tensor tc = Gelu((*conv_norms_[i])(Permute(Reshape(h, {c, t}), {1, 0})));
    h = i + 1 < convs_.size() ? Reshape(Permute(tc, {1, 0}), {1, c, t}) : tc;
  }
  // h: [F, C]
  Tensor x = feat_proj_(feat_norm_(h));
  if (flags) x = RowSubstitute(x, *flags, mask_emb_);
  const std::size_t d = cfg_.d_model;
  Tensor pos = pos_conv_(Reshape(Permute(x, {1, 0}), {1, d, frames}));
  x = Add(x, Gelu(Permute(Reshape(pos, {d, frames}), {1, 0})));
  x = Reshape(x, {1, frames, d});
  EncoderTaps taps;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = (*layers_[i])(x);
    if (i == 0) taps.acoustic = Reshape(x, {frames, d});
  }
  taps.phonetic = Reshape(x, {frames, d});
  return taps;
}

RepresentationBundle Encoder::Encode(const AudioBuffer& x,
                                     const std::optional<std::vector<bool>>& flags) const {
  if (x.sample_rate != 16000)
    throw Error(ErrorKind::kRateMismatch, "encoder input must be 16 kHz, got " +
                                              std::to_string(x.sample_rate));
  ValidateAudio(x);
  nn::NoGradGuard no_grad;
  auto taps = Forward(nn::Tensor::FromData({x.size()}, x.samples), flags ? &*flags : nullptr);
  return {taps.acoustic, taps.phonetic, {}};
}

nn::Tensor DistillLoss(const EncoderTaps& student, const EncoderTaps& teacher) {
  if (student.acoustic.shape() != teacher.acoustic.shape() ||
      student.phonetic.shape() != teacher.phonetic.shape())
    throw Error(ErrorKind::kShapeMismatch, "student and teacher taps differ in shape");
  return nn::Add(nn::MseLoss(student.acoustic, teacher.acoustic),
                 nn::MseLoss(student.phonetic, teacher.phonetic));
}

std::unique_ptr<Encoder> LoadEncoder(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "encoder")
    throw Error(ErrorKind::kConfigMismatch, "expected an encoder checkpoint, got " + ckpt.kind);
  auto enc = std::make_unique<Encoder>(ckpt.config.get<EncoderConfig>());
  ckpt.LoadInto(*enc);
  return enc;
}

nn::TrainResult TrainEncoder(const std::vector<EncoderTrainPair>& pairs,
                             const EncoderConfig& cfg, const nn::TrainOptions& opt,
                             const nn::Checkpoint* teacher_ckpt) {
  if (pairs.empty()) throw Error(ErrorKind::kNoData, "no encoder training pairs");
  Encoder teacher(cfg);
  if (teacher_ckpt) teacher_ckpt->LoadInto(teacher);
  teacher.SetRequiresGrad(false);
  Encoder student(cfg);
  student.CopyFrom(teacher);

  // Teacher targets and loss flags are fixed per pair.
  std::vector<EncoderTaps> targets;
  std::vector<std::vector<bool>> flags;
  for (const auto& p : pairs) {
    if (p.clean.size() != p.degraded.size())
      throw Error(ErrorKind::kShapeMismatch, "clean/degraded lengths differ");
    targets.push_back([&] {
      nn::NoGradGuard ng;
      return teacher.Forward(nn::Tensor::FromData({p.clean.size()}, p.clean.samples));
    }());
    flags.push_back(!p.flags.empty()
                        ? p.flags
                        : plc::EmbedMask(plc::DetectLoss(p.degraded, cfg.frame_hop),
                                         student.NumFrames(p.degraded.size())));
  }

  nn::TrainResult result;
  nn::Adam adam(student.Parameters(), {.lr = opt.lr, .max_grad_norm = opt.max_grad_norm});
  for (long step = 0; step < opt.steps; ++step) {
    const std::size_t i = static_cast<std::size_t>(step) % pairs.size();
    adam.ZeroGrad();
    auto wav = nn::Tensor::FromData({pairs[i].degraded.size()}, pairs[i].degraded.samples);
    auto loss = DistillLoss(student.Forward(wav, &flags[i]), targets[i]);
    const double value = loss.item();
    if (step == 0) result.initial_loss = result.best_loss = value;
    result.final_loss = value;
    result.best_loss = std::min(result.best_loss, value);
    result.steps_run = step + 1;
    result.log.Add(step, {{"distill_loss", value}});
    if (opt.stop_ratio > 0.0 && value < opt.stop_ratio * result.initial_loss) break;
    loss.Backward();
    adam.Step();
  }
  result.checkpoint = nn::Checkpoint::FromModule("encoder", cfg, student);
  return result;
}

}  // namespace fse::encoder
