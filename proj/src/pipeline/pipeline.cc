// src/pipeline/pipeline.cc

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

#include "fse/pipeline/pipeline.h"

#include <exception>
#include <thread>

#include "fse/dsp/resample.h"
#include "fse/error.h"
#include "fse/gen/train.h"
#include "fse/postnet/postnet.h"
#include "fse/predictor/predictor.h"

namespace fse::pipeline {

const nn::Checkpoint& CheckpointStore::Get(Stage s) const {
  const auto it = ckpts.find(s);
  if (it == ckpts.end())
    throw Error(ErrorKind::kMissingDependency, "no " + StageName(s) + " checkpoint");
  return it->second;
}

const nn::Checkpoint* CheckpointStore::Find(Stage s) const {
  const auto it = ckpts.find(s);
  return it == ckpts.end() ? nullptr : &it->second;
}

CheckpointStore CheckpointStore::Load(const std::filesystem::path& dir) {
  CheckpointStore store;
  for (Stage s : kAllStages) {
    const auto p = dir / (StageName(s) + ".ckpt");
    if (std::filesystem::exists(p)) store.ckpts.emplace(s, nn::Checkpoint::Load(p.string()));
  }
  return store;
}

void CheckpointStore::Save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [s, c] : ckpts) c.Save((dir / (StageName(s) + ".ckpt")).string());
}

CheckpointStore InitialCheckpoints(const RunConfig& cfg) {
  cfg.Validate();
  CheckpointStore store;
  {
    encoder::Encoder m(cfg.encoder);
    store.ckpts.emplace(Stage::kEncoder, nn::Checkpoint::FromModule("encoder", cfg.encoder, m));
  }
  {
    gen::Adapter m(cfg.adapter.model);
    store.ckpts.emplace(Stage::kAdapter, nn::Checkpoint::FromModule("adapter", cfg.adapter, m));
  }
  {
    gen::Vocoder m(cfg.vocoder.model);
    store.ckpts.emplace(Stage::kVocoder, nn::Checkpoint::FromModule("vocoder", cfg.vocoder, m));
  }
  {
    predictor::Predictor m(cfg.predictor);
    store.ckpts.emplace(Stage::kPredictor,
                        nn::Checkpoint::FromModule("predictor", cfg.predictor, m));
  }
  {
    postnet::PostNet m(cfg.postnet.model);
    store.ckpts.emplace(Stage::kPostnet, nn::Checkpoint::FromModule("postnet", cfg.postnet, m));
  }
  return store;
}

PipelineCheckpointSet::PipelineCheckpointSet(const CheckpointStore& store) : store_(store) {
  for (Stage s : kAllStages) {
    const auto& c = store_.Get(s);
    if (c.kind != StageName(s))
      throw Error(ErrorKind::kConfigMismatch,
                  "slot " + StageName(s) + " holds a " + c.kind + " checkpoint");
  }
  try {
    const auto enc = store_.Get(Stage::kEncoder).config.get<encoder::EncoderConfig>();
    const auto ad = store_.Get(Stage::kAdapter).config.get<gen::GenTrainConfig>();
    const auto voc = store_.Get(Stage::kVocoder).config.get<gen::GenTrainConfig>();
    const auto post = store_.Get(Stage::kPostnet).config.get<postnet::PostNetTrainConfig>();
    if (ad.model.input_dim != enc.d_model || voc.model.input_dim != enc.d_model)
      throw Error(ErrorKind::kConfigMismatch,
                  "adapter/vocoder width differs from encoder d_model " +
                      std::to_string(enc.d_model));
    if (post.model.in_rate != 16000 || post.model.out_rate != 48000)
      throw Error(ErrorKind::kConfigMismatch, "post-network must map 16 kHz to 48 kHz");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigMismatch, std::string("unreadable checkpoint config: ") + e.what());
  }
}

struct Enhancer::Models {
  std::unique_ptr<postnet::Branches> branches;
  std::unique_ptr<postnet::PostNet> post;
};

Enhancer::Enhancer(const PipelineCheckpointSet& set) : m_(std::make_unique<Models>()) {
  m_->branches = std::make_unique<postnet::Branches>(postnet::BranchCheckpoints{
      &set[Stage::kEncoder], &set[Stage::kAdapter], &set[Stage::kVocoder],
      &set[Stage::kPredictor]});
  m_->post = postnet::LoadPostNet(set[Stage::kPostnet]);
}

Enhancer::~Enhancer() = default;

AudioBuffer Enhancer::Enhance(const AudioBuffer& x, const EnhanceOptions& opt) const {
  if (x.sample_rate > 48000)
    throw Error(ErrorKind::kUnsupportedRate,
                "input rate " + std::to_string(x.sample_rate) + " exceeds 48000 Hz");
  if (!IsSupportedRate(x.sample_rate))
    throw Error(ErrorKind::kUnsupportedRate,
                "input rate " + std::to_string(x.sample_rate) + " is not supported");
  ValidateAudio(x);
  auto probe = [&](const char* point, const AudioBuffer& b) {
    if (opt.probe) opt.probe(point, b);
  };
  const AudioBuffer x16 = x.sample_rate == 16000 ? x : Resample(x, 16000);
  probe("input16k", x16);
  const auto branches = m_->branches->Run(x16, opt.parallel);
  probe("generative", branches.generative);
  probe("predictive", branches.predictive);
  const AudioBuffer y48 = m_->post->FuseAndExtend(branches.generative, branches.predictive);
  probe("fused48k", y48);
  AudioBuffer y = postnet::Finalize(y48, x.sample_rate);
  probe("output", y);
  return y;
}

AudioBuffer Enhance(const AudioBuffer& x, const PipelineCheckpointSet& set,
                    const EnhanceOptions& opt) {
  return Enhancer(set).Enhance(x, opt);
}

std::vector<Stage> Dependencies(Stage s) {
  switch (s) {
    case Stage::kEncoder:
    case Stage::kPredictor:
      return {};
    case Stage::kAdapter:
    case Stage::kVocoder:
      return {Stage::kEncoder};
    case Stage::kPostnet:
      return {Stage::kEncoder, Stage::kAdapter, Stage::kVocoder, Stage::kPredictor};
  }
  return {};
}

nn::TrainResult RunStage(Stage stage, const RunConfig& cfg, const CheckpointStore& upstream) {
  cfg.Validate();
  for (Stage dep : Dependencies(stage))
    if (!upstream.Has(dep))
      throw Error(ErrorKind::kMissingDependency,
                  StageName(stage) + " stage needs the " + StageName(dep) + " checkpoint");
  DataConfig data = cfg.data;
  if (stage == Stage::kPredictor) {
    // The predictive branch does not see packet loss or bandlimiting.
    data.sampler["p_loss"] = 0.0;
    data.sampler["p_bandlimit"] = 0.0;
  }
  const auto pairs = SimulatePairs(data);
  const nn::TrainOptions& opt = cfg.train.For(stage);

  nn::TrainResult r;
  switch (stage) {
    case Stage::kEncoder: {
      std::vector<encoder::EncoderTrainPair> v;
      for (const auto& p : pairs) v.push_back({p.clean16, p.degraded16, {}});
      r = encoder::TrainEncoder(v, cfg.encoder, opt);
      break;
    }
    case Stage::kAdapter: {
      std::vector<encoder::EncoderTrainPair> v;
      for (const auto& p : pairs) v.push_back({p.clean16, p.degraded16, {}});
      r = gen::TrainAdapter(v, upstream.Find(Stage::kEncoder), cfg.adapter, opt);
      break;
    }
    case Stage::kVocoder: {
      std::vector<AudioBuffer> v;
      for (const auto& p : pairs) v.push_back(p.clean16);
      r = gen::TrainVocoder(v, upstream.Find(Stage::kEncoder), cfg.vocoder, opt);
      break;
    }
    case Stage::kPredictor: {
      std::vector<predictor::PredictorTrainPair> v;
      for (const auto& p : pairs) v.push_back({p.clean16, p.degraded16, p.recipe});
      r = predictor::TrainPredictor(v, cfg.predictor, opt);
      break;
    }
    case Stage::kPostnet: {
      std::vector<postnet::PostNetTrainPair> v;
      for (const auto& p : pairs) v.push_back({p.degraded16, p.clean48});
      r = postnet::TrainPostNet(v,
                                {upstream.Find(Stage::kEncoder), upstream.Find(Stage::kAdapter),
                                 upstream.Find(Stage::kVocoder), upstream.Find(Stage::kPredictor)},
                                cfg.postnet, opt);
      break;
    }
  }
  nlohmann::json hashed = {{"config", StageConfigJson(cfg, stage)}, {"train", opt}};
  r.checkpoint.provenance["config_hash"] = nn::HexDigest(nn::Fnv1a64(hashed.dump()));
  r.checkpoint.provenance["data_hash"] = DataHash(pairs);
  r.checkpoint.provenance["stage"] = StageName(stage);
  return r;
}

}  // namespace fse::pipeline
