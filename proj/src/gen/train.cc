// src/gen/train.cc

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

#include "fse/gen/train.h"

#include <algorithm>

#include "fse/error.h"
#include "fse/nn/optim.h"
#include "fse/plc/plc.h"

namespace fse::gen {
namespace {

std::unique_ptr<encoder::Encoder> FrozenEncoder(const nn::Checkpoint* ckpt,
                                                const GenTrainConfig& cfg) {
  if (!ckpt)
    throw Error(ErrorKind::kMissingDependency, "generative-branch training needs an encoder checkpoint");
  auto enc = encoder::LoadEncoder(*ckpt);
  enc->SetRequiresGrad(false);
  const std::size_t d = enc->config().d_model;
  if (cfg.model.input_dim != d || cfg.disc.repr_disc_dims != d)
    throw Error(ErrorKind::kConfigMismatch,
                "generative branch width does not match encoder d_model " + std::to_string(d));
  return enc;
}

nn::Tensor Wave(const std::vector<double>& s) { return nn::Tensor::FromData({s.size()}, s); }

struct Tracker {
  nn::TrainResult* result;
  // Records the tracked value; true when training should stop.
  bool Update(long step, double value, double stop_ratio) {
    if (step == 0) result->initial_loss = result->best_loss = value;
    result->final_loss = value;
    result->best_loss = std::min(result->best_loss, value);
    result->steps_run = step + 1;
    return stop_ratio > 0.0 && value < stop_ratio * result->initial_loss;
  }
};

bool UsesDiscriminator(const GanLossWeights& w) { return w.adv != 0.0 || w.fm != 0.0; }

// One discriminator update on a real/fake pair; returns the D loss.
double DiscriminatorStep(const DiscriminatorSuite& suite, nn::Module& part, nn::Adam& adam,
                         const DiscriminatorInput& real, const DiscriminatorInput& fake) {
  part.SetRequiresGrad(true);
  adam.ZeroGrad();
  nn::Tensor loss = LsganDiscriminatorLoss(suite.Discriminate(real), suite.Discriminate(fake));
  loss.Backward();
  adam.Step();
  part.SetRequiresGrad(false);
  return loss.item();
}

nn::MetricsLog::Record WithDiscLoss(nn::MetricsLog::Record r, double d_loss) {
  r.push_back({"d_loss", d_loss});
  return r;
}

}  // namespace

GenTrainConfig GenTrainConfig::ToyAdapter() {
  GenTrainConfig c;
  c.model = BackboneConfig::ToyAdapter();
  return c;
}

GenTrainConfig GenTrainConfig::ToyVocoder() {
  GenTrainConfig c;
  c.model = BackboneConfig::ToyVocoder();
  return c;
}

void to_json(nlohmann::json& j, const GenTrainConfig& c) {
  j = {{"model", c.model}, {"disc", c.disc}, {"weights", c.weights}};
}

void from_json(const nlohmann::json& j, GenTrainConfig& c) {
  if (j.contains("model")) c.model = j["model"].get<BackboneConfig>();
  if (j.contains("disc")) c.disc = j["disc"].get<DiscriminatorSuiteConfig>();
  if (j.contains("weights")) c.weights = j["weights"].get<GanLossWeights>();
}

nn::TrainResult TrainVocoder(const std::vector<AudioBuffer>& clean,
                             const nn::Checkpoint* encoder_ckpt, const GenTrainConfig& cfg,
                             const nn::TrainOptions& opt) {
  auto enc = FrozenEncoder(encoder_ckpt, cfg);
  if (clean.empty()) throw Error(ErrorKind::kNoData, "no clean utterances for the vocoder");
  Vocoder vocoder(cfg.model);
  DiscriminatorSuite suite(cfg.disc);
  suite.SetRequiresGrad(false);
  const MultiScaleMelLoss mel(16000);

  std::vector<nn::Tensor> inputs, targets;
  const auto hop = static_cast<std::size_t>(vocoder.istft_config().hop_size);
  for (const auto& x : clean) {
    inputs.push_back(enc->Encode(x).r_a0);
    std::vector<double> y = x.samples;
    y.resize(inputs.back().dim(0) * hop, 0.0);
    targets.push_back(Wave(y));
  }

  nn::TrainResult result;
  Tracker tracker{&result};
  nn::Adam g_adam(vocoder.Parameters(), {.lr = opt.lr, .max_grad_norm = opt.max_grad_norm});
  nn::Adam d_adam(suite.audio_part().Parameters(), {.lr = opt.lr});
  const bool gan = UsesDiscriminator(cfg.weights);
  for (long step = 0; step < opt.steps; ++step) {
    const std::size_t i = static_cast<std::size_t>(step) % clean.size();
    nn::Tensor y_hat = vocoder.Forward(inputs[i]);
    const double d_loss =
        gan ? DiscriminatorStep(suite, suite.audio_part(), d_adam,
                                DiscriminatorInput::Audio(targets[i]),
                                DiscriminatorInput::Audio(y_hat.Detach()))
            : 0.0;
    g_adam.ZeroGrad();
    LossBreakdown loss = VocoderLoss(y_hat, targets[i], suite, mel, cfg.weights);
    result.log.Add(step, WithDiscLoss(loss.terms, d_loss));
    if (tracker.Update(step, loss.Term("mel"), opt.stop_ratio)) break;
    loss.total.Backward();
    g_adam.Step();
  }
  result.checkpoint = nn::Checkpoint::FromModule("vocoder", cfg, vocoder);
  result.checkpoint.provenance["encoder"] = encoder_ckpt->Hash();
  return result;
}

nn::TrainResult TrainAdapter(const std::vector<encoder::EncoderTrainPair>& pairs,
                             const nn::Checkpoint* encoder_ckpt, const GenTrainConfig& cfg,
                             const nn::TrainOptions& opt) {
  auto enc = FrozenEncoder(encoder_ckpt, cfg);
  if (pairs.empty()) throw Error(ErrorKind::kNoData, "no adapter training pairs");
  Adapter adapter(cfg.model);
  DiscriminatorSuite suite(cfg.disc);
  suite.SetRequiresGrad(false);

  std::vector<nn::Tensor> fused, targets;
  for (const auto& p : pairs) {
    if (p.clean.size() != p.degraded.size())
      throw Error(ErrorKind::kShapeMismatch, "clean/degraded lengths differ");
    std::vector<bool> flags = !p.flags.empty()
                                  ? p.flags
                                  : plc::EmbedMask(plc::DetectLoss(p.degraded, enc->config().frame_hop),
                                                   enc->NumFrames(p.degraded.size()));
    const auto bundle = enc->Encode(p.degraded, flags);
    fused.push_back(Adapter::FuseInputs(bundle.r_p, bundle.r_a0));
    targets.push_back(enc->Encode(p.clean).r_a0);
  }

  nn::TrainResult result;
  Tracker tracker{&result};
  nn::Adam g_adam(adapter.Parameters(), {.lr = opt.lr, .max_grad_norm = opt.max_grad_norm});
  nn::Adam d_adam(suite.representation_part().Parameters(), {.lr = opt.lr});
  const bool gan = UsesDiscriminator(cfg.weights);
  for (long step = 0; step < opt.steps; ++step) {
    const std::size_t i = static_cast<std::size_t>(step) % pairs.size();
    nn::Tensor r_hat = adapter.Forward(fused[i]);
    const double d_loss =
        gan ? DiscriminatorStep(suite, suite.representation_part(), d_adam,
                                DiscriminatorInput::Representation(targets[i]),
                                DiscriminatorInput::Representation(r_hat.Detach()))
            : 0.0;
    g_adam.ZeroGrad();
    LossBreakdown loss = AdapterLoss(r_hat, targets[i], suite, cfg.weights);
    result.log.Add(step, WithDiscLoss(loss.terms, d_loss));
    if (tracker.Update(step, loss.Term("mse"), opt.stop_ratio)) break;
    loss.total.Backward();
    g_adam.Step();
  }
  result.checkpoint = nn::Checkpoint::FromModule("adapter", cfg, adapter);
  result.checkpoint.provenance["encoder"] = encoder_ckpt->Hash();
  return result;
}

AudioBuffer RunGenerativeBranch(const encoder::Encoder& enc, const Adapter& adapter,
                                const Vocoder& vocoder, const AudioBuffer& x,
                                const std::optional<std::vector<bool>>& flags) {
  const std::size_t d = enc.config().d_model;
  if (adapter.config().input_dim != d || vocoder.config().input_dim != d)
    throw Error(ErrorKind::kConfigMismatch, "adapter/vocoder width differs from encoder d_model");
  if (x.sample_rate != 16000)
    throw Error(ErrorKind::kRateMismatch, "generative branch runs at 16000 Hz");
  const std::vector<bool> f =
      flags ? *flags
            : plc::EmbedMask(plc::DetectLoss(x, enc.config().frame_hop), enc.NumFrames(x.size()));
  nn::NoGradGuard ng;
  const auto bundle = enc.Encode(x, f);
  AudioBuffer y = vocoder.Vocode(adapter.Adapt(bundle.r_p, bundle.r_a0));
  y.samples.resize(x.size());
  return y;
}

std::unique_ptr<Adapter> LoadAdapter(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "adapter")
    throw Error(ErrorKind::kConfigMismatch, "expected an adapter checkpoint, got " + ckpt.kind);
  auto a = std::make_unique<Adapter>(ckpt.config.get<GenTrainConfig>().model);
  ckpt.LoadInto(*a);
  return a;
}

std::unique_ptr<Vocoder> LoadVocoder(const nn::Checkpoint& ckpt) {
  if (ckpt.kind != "vocoder")
    throw Error(ErrorKind::kConfigMismatch, "expected a vocoder checkpoint, got " + ckpt.kind);
  auto v = std::make_unique<Vocoder>(ckpt.config.get<GenTrainConfig>().model);
  ckpt.LoadInto(*v);
  return v;
}

}  // namespace fse::gen
