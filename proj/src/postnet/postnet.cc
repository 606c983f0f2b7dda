// src/postnet/postnet.cc

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

#include "fse/postnet/postnet.h"

#include <algorithm>
#include <thread>

#include "fse/dsp/resample.h"
#include "fse/dsp/stft_json.h"
#include "fse/error.h"
#include "fse/gen/train.h"
#include "fse/nn/optim.h"

namespace fse::postnet {

predictor::PredictorConfig PostNetConfig::ToyCore() {
  predictor::PredictorConfig c;
  c.n_blocks = 2;
  c.lstm_hidden = 32;
  c.emb_dim = 16;
  c.attn_heads = 2;
  c.stft.fft_size = 966;
  c.stft.hop_size = 483;
  c.seed = 41;
  return c;
}

PostNetConfig PostNetConfig::FullSize() {
  PostNetConfig c;
  c.core.n_blocks = 4;
  c.core.lstm_hidden = 128;
  c.core.emb_dim = 48;
  c.core.attn_heads = 4;
  return c;
}

void PostNetConfig::Validate() const {
  core.Validate();
  if (out_rate != 3 * in_rate)
    throw Error(ErrorKind::kConfigError, "post-network out_rate must be 3 x in_rate");
  if (n_subbands == 0 || core.stft.num_bins() % static_cast<int>(n_subbands) != 0)
    throw Error(ErrorKind::kConfigError,
                "n_subbands must divide the " + std::to_string(core.stft.num_bins()) +
                    " bins of the 48 kHz grid");
}

void to_json(nlohmann::json& j, const PostNetConfig& c) {
  j = {{"n_subbands", c.n_subbands}, {"core", c.core}, {"in_rate", c.in_rate},
       {"out_rate", c.out_rate}};
}

void from_json(const nlohmann::json& j, PostNetConfig& c) {
  c.n_subbands = j.value("n_subbands", c.n_subbands);
  if (j.contains("core")) c.core = j["core"].get<predictor::PredictorConfig>();
  c.in_rate = j.value("in_rate", c.in_rate);
  c.out_rate = j.value("out_rate", c.out_rate);
}

nn::Tensor SubbandSplit(const nn::Tensor& s, std::size_t k) {
  if (s.rank() != 3 || k == 0 || s.dim(1) % k != 0)
    throw Error(ErrorKind::kShapeMismatch, "cannot split " + nn::ShapeString(s.shape()) +
                                               " into " + std::to_string(k) + " subbands");
  const std::size_t t = s.dim(0), f = s.dim(1) / k, c = s.dim(2);
  return nn::Reshape(nn::Permute(nn::Reshape(s, {t, k, f, c}), {0, 2, 1, 3}), {t, f, k * c});
}

nn::Tensor SubbandMerge(const nn::Tensor& s, std::size_t k, std::size_t channels) {
  if (s.rank() != 3 || s.dim(2) != k * channels)
    throw Error(ErrorKind::kShapeMismatch, "cannot merge " + nn::ShapeString(s.shape()));
  const std::size_t t = s.dim(0), f = s.dim(1);
  return nn::Reshape(nn::Permute(nn::Reshape(s, {t, f, k, channels}), {0, 2, 1, 3}),
                     {t, f * k, channels});
}

PostNet::PostNet(const PostNetConfig& cfg, bool zero_init_output)
    : cfg_((cfg.Validate(), cfg)), init_(cfg.core.seed),
      core_(4 * cfg.n_subbands, 2 * cfg.n_subbands, cfg.core.n_blocks, cfg.core.emb_dim,
            cfg.core.lstm_hidden, cfg.core.attn_heads, init_, zero_init_output) {
  AddModule("core", core_);
}

nn::Tensor PostNet::Forward(const nn::Tensor& gen48, const nn::Tensor& pred48) const {
  if (gen48.shape() != pred48.shape() || gen48.rank() != 1 ||
      gen48.dim(0) < static_cast<std::size_t>(cfg_.core.stft.hop_size))
    throw Error(ErrorKind::kShapeMismatch, "post-network inputs must be equal-length waveforms");
  const auto& stft = cfg_.core.stft;
  const nn::Tensor sg = nn::StftOp(gen48, stft), sp = nn::StftOp(pred48, stft);
  const std::size_t k = cfg_.n_subbands;
  nn::Tensor corr = SubbandMerge(core_(SubbandSplit(nn::Concat({sg, sp}, 2), k)), k, 2);
  nn::Tensor out = nn::Add(nn::Scale(nn::Add(sg, sp), 0.5), corr);
  return nn::IstftOp(out, stft, gen48.dim(0));
}

AudioBuffer PostNet::FuseAndExtend(const AudioBuffer& gen_out, const AudioBuffer& pred_out) const {
  if (gen_out.sample_rate != cfg_.in_rate || pred_out.sample_rate != cfg_.in_rate)
    throw Error(ErrorKind::kShapeMismatch, "post-network inputs must be " +
                                               std::to_string(cfg_.in_rate) + " Hz");
  if (gen_out.size() != pred_out.size())
    throw Error(ErrorKind::kShapeMismatch, "branch outputs differ in length");
  const AudioBuffer g = Resample(gen_out, cfg_.out_rate);
  const AudioBuffer p = Resample(pred_out, cfg_.out_rate);
  nn::NoGradGuard ng;
  const auto y = Forward(nn::Tensor::FromData({g.size()}, g.samples),
                         nn::Tensor::FromData({p.size()}, p.samples));
  return AudioBuffer(y.ToVector(), cfg_.out_rate);
}

AudioBuffer Finalize(const AudioBuffer& y48, int original_rate) {
  if (original_rate > 48000)
    throw Error(ErrorKind::kUnsupportedRate,
                std::to_string(original_rate) + " Hz is above the 48000 Hz output grid");
  if (y48.sample_rate != 48000)
    throw Error(ErrorKind::kRateMismatch, "finalize expects a 48000 Hz buffer");
  if (original_rate == 48000) return y48;
  return Resample(y48, original_rate);
}

nn::LossBreakdown PostnetLoss(const nn::Tensor& y_hat, const nn::Tensor& y,
                              const gen::DiscriminatorSuite& suite,
                              const gen::MultiScaleMelLoss& mel, const gen::GanLossWeights& w,
                              const std::vector<MetricHook>& hooks) {
  nn::LossBreakdown out = gen::VocoderLoss(y_hat, y, suite, mel, w);
  if (hooks.empty()) return out;
  out.terms.pop_back();  // total, re-added below
  for (const auto& h : hooks) {
    const nn::Tensor v = h.fn(y_hat, y);
    out.total = nn::Add(out.total, nn::Scale(v, h.weight));
    out.terms.push_back({h.name, v.item()});
  }
  out.terms.push_back({"total", out.total.item()});
  return out;
}

Branches::Branches(const BranchCheckpoints& c) {
  if (!c.encoder || !c.adapter || !c.vocoder || !c.predictor)
    throw Error(ErrorKind::kMissingDependency,
                "the post-network needs encoder, adapter, vocoder and predictor checkpoints");
  encoder_ = encoder::LoadEncoder(*c.encoder);
  adapter_ = gen::LoadAdapter(*c.adapter);
  vocoder_ = gen::LoadVocoder(*c.vocoder);
  predictor_ = predictor::LoadPredictor(*c.predictor);
  const std::size_t d = encoder_->config().d_model;
  if (adapter_->config().input_dim != d || vocoder_->config().input_dim != d)
    throw Error(ErrorKind::kConfigMismatch, "adapter/vocoder width differs from encoder d_model " +
                                                std::to_string(d));
}

BranchOutputs Branches::Run(const AudioBuffer& x16, bool parallel) const {
  if (x16.sample_rate != 16000)
    throw Error(ErrorKind::kRateMismatch, "branches run at 16000 Hz");
  BranchOutputs out;
  if (!parallel) {
    out.generative = gen::RunGenerativeBranch(*encoder_, *adapter_, *vocoder_, x16);
    out.predictive = predictor_->Predict(x16);
    return out;
  }
  std::exception_ptr failure;
  std::thread worker([&] {
    try {
      out.predictive = predictor_->Predict(x16);
    } catch (...) {
      failure = std::current_exception();
    }
  });
  try {
    out.generative = gen::RunGenerativeBranch(*encoder_, *adapter_, *vocoder_, x16);
  } catch (...) {
    worker.join();
    throw;
  }
  worker.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

void to_json(nlohmann::json& j, const PostNetTrainConfig& c) {
  j = {{"model", c.model}, {"disc", c.disc}, {"weights", c.weights}};
}

void from_json(const nlohmann::json& j, PostNetTrainConfig& c) {
  if (j.contains("model")) c.model = j["model"].get<PostNetConfig>();
  if (j.contains("disc")) c.disc = j["disc"].get<gen::DiscriminatorSuiteConfig>();
  if (j.contains("weights")) c.weights = j["weights"].get<gen::GanLossWeights>();
}

nn::TrainResult TrainPostNet(const std::vector<PostNetTrainPair>& pairs,
                             const BranchCheckpoints& ckpts, const PostNetTrainConfig& cfg,
                             const nn::TrainOptions& opt, const std::vector<MetricHook>& hooks) {
  const Branches branches(ckpts);
  if (pairs.empty()) throw Error(ErrorKind::kNoData, "no post-network training pairs");
  PostNet model(cfg.model);
  gen::DiscriminatorSuite suite(cfg.disc);
  suite.SetRequiresGrad(false);
  const gen::MultiScaleMelLoss mel(cfg.model.out_rate);

  struct Example {
    nn::Tensor gen, pred, target;
  };
  std::vector<Example> data;
  for (const auto& p : pairs) {
    if (p.degraded.sample_rate != cfg.model.in_rate || p.clean.sample_rate != cfg.model.out_rate)
      throw Error(ErrorKind::kRateMismatch, "post-network pairs need 16000 Hz input, 48000 Hz target");
    if (p.clean.size() != 3 * p.degraded.size())
      throw Error(ErrorKind::kShapeMismatch, "target must be 3x the input length");
    const auto b = branches.Run(p.degraded);
    const auto g = Resample(b.generative, cfg.model.out_rate);
    const auto q = Resample(b.predictive, cfg.model.out_rate);
    data.push_back({nn::Tensor::FromData({g.size()}, g.samples),
                    nn::Tensor::FromData({q.size()}, q.samples),
                    nn::Tensor::FromData({p.clean.size()}, p.clean.samples)});
  }

  nn::TrainResult result;
  nn::Adam g_adam(model.Parameters(), {.lr = opt.lr, .max_grad_norm = opt.max_grad_norm});
  nn::Adam d_adam(suite.audio_part().Parameters(), {.lr = opt.lr});
  const bool gan = cfg.weights.adv != 0.0 || cfg.weights.fm != 0.0;
  for (long step = 0; step < opt.steps; ++step) {
    const auto& ex = data[static_cast<std::size_t>(step) % data.size()];
    nn::Tensor y_hat = model.Forward(ex.gen, ex.pred);
    double d_loss = 0.0;
    if (gan) {
      suite.audio_part().SetRequiresGrad(true);
      d_adam.ZeroGrad();
      nn::Tensor dl = gen::LsganDiscriminatorLoss(
          suite.Discriminate(gen::DiscriminatorInput::Audio(ex.target)),
          suite.Discriminate(gen::DiscriminatorInput::Audio(y_hat.Detach())));
      dl.Backward();
      d_adam.Step();
      suite.audio_part().SetRequiresGrad(false);
      d_loss = dl.item();
    }
    g_adam.ZeroGrad();
    auto loss = PostnetLoss(y_hat, ex.target, suite, mel, cfg.weights, hooks);
    auto record = loss.terms;
    record.push_back({"d_loss", d_loss});
    result.log.Add(step, record);
    const double value = loss.Term("mel");
    if (step == 0) result.initial_loss = result.best_loss = value;
    result.final_loss = value;
    result.best_loss = std::min(result.best_loss, value);
    result.steps_run = step + 1;
    if (opt.stop_ratio > 0.0 && value < opt.stop_ratio * result.initial_loss) break;
    loss.total.Backward();
    g_adam.Step();
  }
  result.checkpoint = nn::Checkpoint::FromModule("postnet", cfg, model);
  result.checkpoint.provenance["encoder"] = ckpts.encoder->Hash();
  result.checkpoint.provenance["adapter"] = ckpts.adapter->Hash();
  result.checkpoint.provenance["vocoder"] = ckpts.vocoder->Hash();
  result.checkpoint.provenance["predictor"] = ckpts.predictor->Hash();
  return result;
}

std::unique_ptr<PostNet> LoadPostNet(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "postnet")
    throw Error(ErrorKind::kConfigMismatch, "expected a postnet checkpoint, got " + ckpt.kind);
  auto p = std::make_unique<PostNet>(ckpt.config.get<PostNetTrainConfig>().model);
  ckpt.LoadInto(*p);
  return p;
}

}  // namespace fse::postnet
