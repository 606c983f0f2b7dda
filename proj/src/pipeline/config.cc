// src/pipeline/config.cc

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

#include "fse/pipeline/config.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <utility>

#include "fse/error.h"

namespace fse::nn {

void to_json(nlohmann::json& j, const TrainOptions& o) {
  j = {{"steps", o.steps},
       {"lr", o.lr},
       {"seed", o.seed},
       {"stop_ratio", o.stop_ratio},
       {"max_grad_norm", o.max_grad_norm}};
}

void from_json(const nlohmann::json& j, TrainOptions& o) {
  TrainOptions d;
  o.steps = j.value("steps", d.steps);
  o.lr = j.value("lr", d.lr);
  o.seed = j.value("seed", d.seed);
  o.stop_ratio = j.value("stop_ratio", d.stop_ratio);
  o.max_grad_norm = j.value("max_grad_norm", d.max_grad_norm);
}

}  // namespace fse::nn

namespace fse::pipeline {

std::string StageName(Stage s) {
  switch (s) {
    case Stage::kEncoder:
      return "encoder";
    case Stage::kAdapter:
      return "adapter";
    case Stage::kVocoder:
      return "vocoder";
    case Stage::kPredictor:
      return "predictor";
    case Stage::kPostnet:
      return "postnet";
  }
  return "encoder";
}

Stage StageFromName(const std::string& name) {
  for (Stage s : kAllStages)
    if (StageName(s) == name) return s;
  throw Error(ErrorKind::kInvalidParameter, "unknown stage '" + name + "'");
}

bool IsSupportedRate(int rate) {
  return std::find(kSupportedRates.begin(), kSupportedRates.end(), rate) != kSupportedRates.end();
}

void to_json(nlohmann::json& j, const DataConfig& c) {
  j = {{"clean_manifest", c.clean_manifest}, {"noise_dir", c.noise_dir},
       {"n_utterances", c.n_utterances},     {"segment_s", c.segment_s},
       {"seed", c.seed},                     {"sampler", c.sampler}};
}

void from_json(const nlohmann::json& j, DataConfig& c) {
  DataConfig d;
  c.clean_manifest = j.value("clean_manifest", d.clean_manifest);
  c.noise_dir = j.value("noise_dir", d.noise_dir);
  c.n_utterances = j.value("n_utterances", d.n_utterances);
  c.segment_s = j.value("segment_s", d.segment_s);
  c.seed = j.value("seed", d.seed);
  c.sampler = j.value("sampler", d.sampler);
}

const nn::TrainOptions& StageTraining::For(Stage s) const {
  switch (s) {
    case Stage::kEncoder:
      return encoder;
    case Stage::kAdapter:
      return adapter;
    case Stage::kVocoder:
      return vocoder;
    case Stage::kPredictor:
      return predictor;
    case Stage::kPostnet:
      return postnet;
  }
  return encoder;
}

nn::TrainOptions& StageTraining::For(Stage s) {
  return const_cast<nn::TrainOptions&>(std::as_const(*this).For(s));
}

RunConfig RunConfig::Toy() {
  RunConfig c;
  c.train.encoder = {.steps = 20, .lr = 1e-3};
  c.train.adapter = {.steps = 20, .lr = 2e-3};
  c.train.vocoder = {.steps = 20, .lr = 2e-3};
  c.train.predictor = {.steps = 20, .lr = 1e-2};
  c.train.postnet = {.steps = 20, .lr = 5e-3};
  return c;
}

RunConfig RunConfig::FullSize() {
  RunConfig c = Toy();
  c.full_size = true;
  c.encoder = encoder::EncoderConfig::FullSize();
  c.adapter.model = gen::BackboneConfig::FullAdapter();
  c.vocoder.model = gen::BackboneConfig::FullVocoder();
  c.adapter.disc.repr_disc_dims = c.encoder.d_model;
  c.vocoder.disc.repr_disc_dims = c.encoder.d_model;
  c.predictor = predictor::PredictorConfig::FullSize();
  c.postnet.model = postnet::PostNetConfig::FullSize();
  return c;
}

void RunConfig::Validate() const {
  try {
    encoder.Validate();
    adapter.model.Validate();
    adapter.disc.Validate();
    vocoder.model.Validate();
    vocoder.disc.Validate();
    predictor.Validate();
    postnet.model.Validate();
    postnet.disc.Validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfigError, e.what());
  }
  const std::size_t d = encoder.d_model;
  if (adapter.model.input_dim != d || vocoder.model.input_dim != d)
    throw Error(ErrorKind::kConfigError,
                "adapter and vocoder input_dim must equal encoder d_model " + std::to_string(d));
  if (adapter.disc.repr_disc_dims != d)
    throw Error(ErrorKind::kConfigError, "adapter representation discriminator width != d_model");
  if (adapter.model.has_istft_head || !vocoder.model.has_istft_head)
    throw Error(ErrorKind::kConfigError, "only the vocoder carries an iSTFT head");
  if (data.n_utterances == 0 || !(data.segment_s > 0.0))
    throw Error(ErrorKind::kConfigError, "data needs at least one utterance of positive length");
}

std::filesystem::path RunConfig::CheckpointDir() const {
  return std::filesystem::path(output_root) / "checkpoints";
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"full_size", c.full_size},
       {"encoder", c.encoder},
       {"adapter", c.adapter},
       {"vocoder", c.vocoder},
       {"predictor", c.predictor},
       {"postnet", c.postnet},
       {"train",
        {{"encoder", c.train.encoder},
         {"adapter", c.train.adapter},
         {"vocoder", c.train.vocoder},
         {"predictor", c.train.predictor},
         {"postnet", c.train.postnet}}},
       {"data", c.data},
       {"output_root", c.output_root},
       {"cache_root", c.cache_root}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  const RunConfig preset = j.value("full_size", false) ? RunConfig::FullSize() : RunConfig::Toy();
  nlohmann::json merged = preset;
  merged.merge_patch(j);
  c.full_size = merged.at("full_size").get<bool>();
  c.encoder = merged.at("encoder").get<encoder::EncoderConfig>();
  c.adapter = merged.at("adapter").get<gen::GenTrainConfig>();
  c.vocoder = merged.at("vocoder").get<gen::GenTrainConfig>();
  c.predictor = merged.at("predictor").get<predictor::PredictorConfig>();
  c.postnet = merged.at("postnet").get<postnet::PostNetTrainConfig>();
  for (Stage s : kAllStages)
    c.train.For(s) = merged.at("train").at(StageName(s)).get<nn::TrainOptions>();
  c.data = merged.at("data").get<DataConfig>();
  c.output_root = merged.at("output_root").get<std::string>();
  c.cache_root = merged.at("cache_root").get<std::string>();
}

void ApplyEnvironment(RunConfig& c) {
  if (const char* v = std::getenv("FSE_OUTPUT_ROOT"); v && *v) c.output_root = v;
  if (const char* v = std::getenv("FSE_CACHE_ROOT"); v && *v) c.cache_root = v;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  RunConfig c;
  try {
    c = nlohmann::json::parse(f, nullptr, true, /*ignore_comments=*/true).get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, path.string() + ": " + e.what());
  }
  ApplyEnvironment(c);
  c.Validate();
  return c;
}

void SaveRunConfig(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f << nlohmann::json(c).dump(2) << '\n';
}

nlohmann::json StageConfigJson(const RunConfig& c, Stage s) {
  switch (s) {
    case Stage::kEncoder:
      return c.encoder;
    case Stage::kAdapter:
      return c.adapter;
    case Stage::kVocoder:
      return c.vocoder;
    case Stage::kPredictor:
      return c.predictor;
    case Stage::kPostnet:
      return c.postnet;
  }
  return {};
}

}  // namespace fse::pipeline
