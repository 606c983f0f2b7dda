// include/fse/pipeline/pipeline.h

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

#ifndef FSE_PIPELINE_PIPELINE_H_
#define FSE_PIPELINE_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "fse/nn/checkpoint.h"
#include "fse/pipeline/config.h"
#include "fse/pipeline/data.h"

namespace fse::pipeline {

/// Stage checkpoints keyed by stage; any subset may be present.
struct CheckpointStore {
  std::map<Stage, nn::Checkpoint> ckpts;

  bool Has(Stage s) const { return ckpts.count(s) > 0; }
  /// Errors: MissingDependency.
  const nn::Checkpoint& Get(Stage s) const;
  const nn::Checkpoint* Find(Stage s) const;

  /// Reads every <stage>.ckpt found in `dir`.
  static CheckpointStore Load(const std::filesystem::path& dir);
  void Save(const std::filesystem::path& dir) const;
};

/// Random-weight checkpoints for every stage of `cfg`, without training.
CheckpointStore InitialCheckpoints(const RunConfig& cfg);

/// All five checkpoints, checked for compatibility.
class PipelineCheckpointSet {
 public:
  /// Errors: MissingDependency when a stage is absent; ConfigMismatch on
  /// a kind or width mismatch.
  explicit PipelineCheckpointSet(const CheckpointStore& store);
  const nn::Checkpoint& operator[](Stage s) const { return store_.Get(s); }

 private:
  CheckpointStore store_;
};

/// Observes intermediate signals: "input16k", "generative", "predictive",
/// "fused48k" and "output".
using Probe = std::function<void(const std::string& point, const AudioBuffer& x)>;

struct EnhanceOptions {
  /// Run the two branches on separate threads.
  bool parallel = false;
  Probe probe;
};

/// Loaded models for repeated enhancement. Const and safe to share.
class Enhancer {
 public:
  explicit Enhancer(const PipelineCheckpointSet& set);
  ~Enhancer();

  /// resample to 16 kHz -> generative branch || predictive branch ->
  /// fuse and extend to 48 kHz -> finalize at the input rate.
  /// Errors: UnsupportedRate outside the supported set.
  AudioBuffer Enhance(const AudioBuffer& x, const EnhanceOptions& opt = {}) const;

 private:
  struct Models;
  std::unique_ptr<Models> m_;
};

AudioBuffer Enhance(const AudioBuffer& x, const PipelineCheckpointSet& set,
                    const EnhanceOptions& opt = {});

/// Trains one stage on the simulated data of `cfg`. Upstream checkpoints
/// come from `upstream`; the result carries config and data hashes.
/// Dependencies: adapter, vocoder -> encoder; postnet -> all four others.
/// Predictor data is drawn without packet loss or bandlimiting.
/// Errors: MissingDependency; ConfigError.
nn::TrainResult RunStage(Stage stage, const RunConfig& cfg, const CheckpointStore& upstream);

/// Stages `s` depends on.
std::vector<Stage> Dependencies(Stage s);

}  // namespace fse::pipeline

#endif  // FSE_PIPELINE_PIPELINE_H_
