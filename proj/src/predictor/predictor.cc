// src/predictor/predictor.cc

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

#include "fse/predictor/predictor.h"

#include <algorithm>
#include <cmath>

#include "fse/dsp/stft_json.h"
#include "fse/error.h"
#include "fse/nn/optim.h"

namespace fse::predictor {

StftConfig PredictorConfig::ToyStft() {
  StftConfig s;
  s.fft_size = 512;
  s.hop_size = 128;
  return s;
}

PredictorConfig PredictorConfig::FullSize() {
  PredictorConfig c;
  c.n_blocks = 6;
  c.lstm_hidden = 192;
  c.emb_dim = 48;
  c.attn_heads = 4;
  return c;
}

void PredictorConfig::Validate() const {
  if (n_blocks == 0 || lstm_hidden == 0 || emb_dim == 0 || attn_heads == 0)
    throw Error(ErrorKind::kConfigError, "predictor sizes must be positive");
  if (emb_dim % attn_heads != 0)
    throw Error(ErrorKind::kConfigError, "emb_dim must be divisible by attn_heads");
  stft.Validate();
}

void to_json(nlohmann::json& j, const PredictorConfig& c) {
  j = {{"n_blocks", c.n_blocks}, {"lstm_hidden", c.lstm_hidden}, {"emb_dim", c.emb_dim},
       {"attn_heads", c.attn_heads}, {"stft", c.stft},           {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, PredictorConfig& c) {
  c.n_blocks = j.value("n_blocks", c.n_blocks);
  c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
  c.emb_dim = j.value("emb_dim", c.emb_dim);
  c.attn_heads = j.value("attn_heads", c.attn_heads);
  if (j.contains("stft")) c.stft = j["stft"].get<StftConfig>();
  c.seed = j.value("seed", c.seed);
}

FullBandAttention::FullBandAttention(std::size_t dim, std::size_t heads, nn::Initializer& init)
    : dim_(dim), heads_(heads), q_(dim, dim, init), k_(dim, dim, init), v_(dim, dim, init),
      out_(dim, dim, init) {
  AddModule("q", q_);
  AddModule("k", k_);
  AddModule("v", v_);
  AddModule("out", out_);
}

nn::Tensor FullBandAttention::operator()(const nn::Tensor& z) const {
  using namespace nn;
  const std::size_t t = z.dim(0), f = z.dim(1), dh = dim_ / heads_;
  auto split = [&](const Tensor& x) {
    return Reshape(Permute(Reshape(x, {t, f, heads_, dh}), {2, 0, 1, 3}), {heads_, t, f * dh});
  };
  Tensor scores = Scale(BatchMatMul(split(q_(z)), split(k_(z)), false, true),
                        1.0 / std::sqrt(static_cast<double>(f * dh)));
  Tensor ctx = BatchMatMul(Softmax(scores), split(v_(z)), false, false);
  ctx = Reshape(Permute(Reshape(ctx, {heads_, t, f, dh}), {1, 2, 0, 3}), {t, f, dim_});
  return out_(ctx);
}

DualPathBlock::DualPathBlock(std::size_t dim, std::size_t hidden, std::size_t heads,
                             nn::Initializer& init)
    : intra_norm_(dim), intra_lstm_(dim, hidden, init), intra_proj_(2 * hidden, dim, init),
      inter_norm_(dim), inter_lstm_(dim, hidden, init), inter_proj_(2 * hidden, dim, init),
      attn_norm_(dim), attn_(dim, heads, init) {
  AddModule("intra_norm", intra_norm_);
  AddModule("intra_lstm", intra_lstm_);
  AddModule("intra_proj", intra_proj_);
  AddModule("inter_norm", inter_norm_);
  AddModule("inter_lstm", inter_lstm_);
  AddModule("inter_proj", inter_proj_);
  AddModule("attn_norm", attn_norm_);
  AddModule("attn", attn_);
}

nn::Tensor DualPathBlock::operator()(const nn::Tensor& z) const {
  using namespace nn;
  // Sequences along frequency, one per frame.
  Tensor h = Add(z, intra_proj_(intra_lstm_(intra_norm_(z))));
  // Sequences along time, one per bin.
  Tensor u = Permute(h, {1, 0, 2});
  u = Add(u, inter_proj_(inter_lstm_(inter_norm_(u))));
  h = Permute(u, {1, 0, 2});
  return Add(h, attn_(attn_norm_(h)));
}

DualPathCore::DualPathCore(std::size_t in, std::size_t out, std::size_t blocks, std::size_t dim,
                           std::size_t hidden, std::size_t heads, nn::Initializer& init,
                           bool zero_init_output)
    : embed_(in, dim, init), out_(dim, out, init, true, zero_init_output) {
  AddModule("embed", embed_);
  for (std::size_t i = 0; i < blocks; ++i) {
    blocks_.push_back(std::make_unique<DualPathBlock>(dim, hidden, heads, init));
    AddModule("block" + std::to_string(i), *blocks_.back());
  }
  AddModule("out", out_);
}

nn::Tensor DualPathCore::operator()(const nn::Tensor& x) const {
  nn::Tensor z = embed_(x);
  for (const auto& b : blocks_) z = (*b)(z);
  return out_(z);
}

Predictor::Predictor(const PredictorConfig& cfg, bool zero_init_output)
    : cfg_((cfg.Validate(), cfg)), init_(cfg.seed),
      core_(2, 2, cfg.n_blocks, cfg.emb_dim, cfg.lstm_hidden, cfg.attn_heads, init_,
            zero_init_output) {
  AddModule("core", core_);
}

nn::Tensor Predictor::Forward(const nn::Tensor& wav) const {
  if (wav.rank() != 1 || wav.dim(0) < static_cast<std::size_t>(cfg_.stft.hop_size))
    throw Error(ErrorKind::kShapeMismatch, "predictor input must be a waveform of at least " +
                                               std::to_string(cfg_.stft.hop_size) + " samples");
  nn::Tensor s = nn::StftOp(wav, cfg_.stft);  // [T, F, 2]: interleaved re/im per bin
  return nn::IstftOp(nn::Add(s, core_(s)), cfg_.stft, wav.dim(0));
}

AudioBuffer Predictor::Predict(const AudioBuffer& x) const {
  if (x.sample_rate != 16000)
    throw Error(ErrorKind::kRateMismatch,
                "predictor runs at 16000 Hz, got " + std::to_string(x.sample_rate));
  nn::NoGradGuard ng;
  return AudioBuffer(Forward(nn::Tensor::FromData({x.size()}, x.samples)).ToVector(), 16000);
}

nn::LossBreakdown StftDomainLoss(const nn::Tensor& y_hat, const nn::Tensor& y) {
  using namespace nn;
  if (y_hat.shape() != y.shape() || y.rank() != 1)
    throw Error(ErrorKind::kShapeMismatch, "STFT loss needs equal-length waveforms, got " +
                                               ShapeString(y_hat.shape()) + " and " +
                                               ShapeString(y.shape()));
  const StftConfig cfg = StftConfig::Canonical();
  const Tensor a = StftOp(y_hat, cfg), b = StftOp(y, cfg);
  auto re = [](const Tensor& s) { return Slice(s, 2, 0, 1); };
  auto im = [](const Tensor& s) { return Slice(s, 2, 1, 1); };
  auto mag = [&](const Tensor& s) {
    return Sqrt(AddScalar(Add(Square(re(s)), Square(im(s))), 1e-12));
  };
  const Tensor l_re = L1Loss(re(a), re(b));
  const Tensor l_im = L1Loss(im(a), im(b));
  const Tensor l_mag = L1Loss(mag(a), mag(b));
  LossBreakdown out;
  out.total = Add(Add(l_re, l_im), l_mag);
  out.terms = {{"re", l_re.item()},
               {"im", l_im.item()},
               {"mag", l_mag.item()},
               {"total", out.total.item()}};
  return out;
}

bool AcceptsRecipe(const std::optional<degrade::DegradationRecipe>& recipe,
                   std::string* reason) {
  std::string why;
  if (recipe && recipe->has_packet_loss()) why = "packet loss";
  else if (recipe && recipe->has_bandlimit()) why = "bandlimit";
  if (reason) *reason = why;
  return why.empty();
}

nn::TrainResult TrainPredictor(const std::vector<PredictorTrainPair>& pairs,
                               const PredictorConfig& cfg, const nn::TrainOptions& opt) {
  nn::TrainResult result;
  std::vector<const PredictorTrainPair*> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    std::string reason;
    if (!AcceptsRecipe(p.recipe, &reason)) {
      result.log.Note(0, "skip pair " + std::to_string(i) + ": " + reason);
      continue;
    }
    if (p.clean.sample_rate != 16000 || p.degraded.sample_rate != 16000)
      throw Error(ErrorKind::kRateMismatch, "predictor pairs must be 16000 Hz");
    if (p.clean.size() != p.degraded.size())
      throw Error(ErrorKind::kShapeMismatch, "clean/degraded lengths differ");
    kept.push_back(&p);
  }
  if (kept.empty()) throw Error(ErrorKind::kNoData, "no predictor pairs after filtering");

  Predictor model(cfg);
  nn::Adam adam(model.Parameters(), {.lr = opt.lr, .max_grad_norm = opt.max_grad_norm});
  for (long step = 0; step < opt.steps; ++step) {
    const auto& p = *kept[static_cast<std::size_t>(step) % kept.size()];
    adam.ZeroGrad();
    auto loss = StftDomainLoss(
        model.Forward(nn::Tensor::FromData({p.degraded.size()}, p.degraded.samples)),
        nn::Tensor::FromData({p.clean.size()}, p.clean.samples));
    const double value = loss.total.item();
    result.log.Add(step, loss.terms);
    if (step == 0) result.initial_loss = result.best_loss = value;
    result.final_loss = value;
    result.best_loss = std::min(result.best_loss, value);
    result.steps_run = step + 1;
    if (opt.stop_ratio > 0.0 && value < opt.stop_ratio * result.initial_loss) break;
    loss.total.Backward();
    adam.Step();
  }
  result.checkpoint = nn::Checkpoint::FromModule("predictor", cfg, model);
  return result;
}

std::unique_ptr<Predictor> LoadPredictor(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "predictor")
    throw Error(ErrorKind::kConfigMismatch, "expected a predictor checkpoint, got " + ckpt.kind);
  auto p = std::make_unique<Predictor>(ckpt.config.get<PredictorConfig>());
  ckpt.LoadInto(*p);
  return p;
}

}  // namespace fse::predictor
