// include/fse/pipeline/config.h

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

#ifndef FSE_PIPELINE_CONFIG_H_
#define FSE_PIPELINE_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "fse/encoder/encoder.h"
#include "fse/gen/train.h"
#include "fse/nn/train.h"
#include "fse/postnet/postnet.h"
#include "fse/predictor/predictor.h"
#include "json.hpp"

namespace fse::pipeline {

enum class Stage { kEncoder, kAdapter, kVocoder, kPredictor, kPostnet };

inline constexpr std::array<Stage, 5> kAllStages = {
    Stage::kEncoder, Stage::kAdapter, Stage::kVocoder, Stage::kPredictor, Stage::kPostnet};

std::string StageName(Stage s);
/// Errors: InvalidParameter.
Stage StageFromName(const std::string& name);

/// Input rates accepted by enhance.
inline constexpr std::array<int, 7> kSupportedRates = {8000,  16000, 22050, 24000,
                                                       32000, 44100, 48000};
bool IsSupportedRate(int rate);

/// Where training audio comes from. An empty manifest selects the built-in
/// synthetic corpus; an empty noise directory selects seeded noise.
struct DataConfig {
  std::string clean_manifest;
  std::string noise_dir;
  std::size_t n_utterances = 2;
  double segment_s = 0.3;
  std::uint64_t seed = 7;
  /// Overrides for degrade::SamplerConfig.
  nlohmann::json sampler = nlohmann::json::object();

  bool operator==(const DataConfig&) const = default;
};

void to_json(nlohmann::json& j, const DataConfig& c);
void from_json(const nlohmann::json& j, DataConfig& c);

struct StageTraining {
  nn::TrainOptions encoder, adapter, vocoder, predictor, postnet;

  const nn::TrainOptions& For(Stage s) const;
  nn::TrainOptions& For(Stage s);
};

struct RunConfig {
  bool full_size = false;
  encoder::EncoderConfig encoder;
  gen::GenTrainConfig adapter = gen::GenTrainConfig::ToyAdapter();
  gen::GenTrainConfig vocoder = gen::GenTrainConfig::ToyVocoder();
  predictor::PredictorConfig predictor = predictor::PredictorConfig::Toy();
  postnet::PostNetTrainConfig postnet{postnet::PostNetConfig::Toy(), {}, {}};
  StageTraining train;
  DataConfig data;
  std::string output_root = "runs";
  std::string cache_root = ".fse_cache";

  static RunConfig Toy();
  /// Hidden 1024, 12 ConvNeXt blocks, intermediate 3072, fft 1280/320.
  static RunConfig FullSize();

  /// Errors: ConfigError for a bad stage config or incompatible widths.
  void Validate() const;
  std::filesystem::path CheckpointDir() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Missing keys fall back to the preset picked by "full_size".
void from_json(const nlohmann::json& j, RunConfig& c);

/// FSE_OUTPUT_ROOT and FSE_CACHE_ROOT override the two roots when set.
void ApplyEnvironment(RunConfig& c);

/// Errors: Io; ConfigError.
RunConfig LoadRunConfig(const std::filesystem::path& path);
void SaveRunConfig(const std::filesystem::path& path, const RunConfig& c);

/// The stage's model and loss config as stored in its checkpoint.
nlohmann::json StageConfigJson(const RunConfig& c, Stage s);

}  // namespace fse::pipeline

namespace fse::nn {
void to_json(nlohmann::json& j, const TrainOptions& o);
void from_json(const nlohmann::json& j, TrainOptions& o);
}  // namespace fse::nn

#endif  // FSE_PIPELINE_CONFIG_H_
