// include/fse/postnet/postnet.h

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

#ifndef FSE_POSTNET_POSTNET_H_
#define FSE_POSTNET_POSTNET_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fse/encoder/encoder.h"
#include "fse/gen/gan.h"
#include "fse/gen/models.h"
#include "fse/predictor/predictor.h"
#include "json.hpp"

namespace fse::postnet {

struct PostNetConfig {
  std::size_t n_subbands = 4;
  /// Dual-path core; its stft is the internal 48 kHz grid.
  predictor::PredictorConfig core = ToyCore();
  int in_rate = 16000;
  int out_rate = 48000;

  /// 2 blocks, hidden 32, emb 16, 2 heads, fft 966 hop 483 (484 bins).
  static predictor::PredictorConfig ToyCore();
  static PostNetConfig Toy() { return {}; }
  static PostNetConfig FullSize();
  /// Errors: ConfigError.
  void Validate() const;
  bool operator==(const PostNetConfig&) const = default;
};

void to_json(nlohmann::json& j, const PostNetConfig& c);
void from_json(const nlohmann::json& j, PostNetConfig& c);

/// s [T, F, C] -> [T, F / K, K * C]: uniform bin groups stacked as
/// channels. Errors: ShapeMismatch unless K divides F.
nn::Tensor SubbandSplit(const nn::Tensor& s, std::size_t k);
/// Inverse of SubbandSplit for `channels` channels per band.
nn::Tensor SubbandMerge(const nn::Tensor& s, std::size_t k, std::size_t channels);

/// Fusion and bandwidth extension. Both branch waveforms are upsampled to
/// 48 kHz and analysed; the two complex spectra form 4 channels per bin,
/// the subbands are stacked as channels, the dual-path core predicts a
/// complex correction, and the output spectrum is the branch average plus
/// that correction.
class PostNet : public nn::Module {
 public:
  explicit PostNet(const PostNetConfig& cfg, bool zero_init_output = false);
  const PostNetConfig& config() const { return cfg_; }

  /// Differentiable path on 48 kHz waveforms of equal length.
  nn::Tensor Forward(const nn::Tensor& gen48, const nn::Tensor& pred48) const;
  /// Errors: ShapeMismatch on length or rate mismatch.
  AudioBuffer FuseAndExtend(const AudioBuffer& gen_out, const AudioBuffer& pred_out) const;

 private:
  PostNetConfig cfg_;
  nn::Initializer init_;
  predictor::DualPathCore core_;
};

/// Resamples to `original_rate`; passthrough at 48 kHz.
/// Errors: UnsupportedRate above 48 kHz.
AudioBuffer Finalize(const AudioBuffer& y48, int original_rate);

/// Differentiable metric-aware term added to the base loss as
/// weight * fn(y_hat, y).
struct MetricHook {
  std::string name;
  double weight = 1.0;
  std::function<nn::Tensor(const nn::Tensor& y_hat, const nn::Tensor& y)> fn;
};

/// Vocoder loss at 48 kHz plus the weighted hooks. Each hook's raw value is
/// logged under its name. Errors: ShapeMismatch.
nn::LossBreakdown PostnetLoss(const nn::Tensor& y_hat, const nn::Tensor& y,
                              const gen::DiscriminatorSuite& suite,
                              const gen::MultiScaleMelLoss& mel, const gen::GanLossWeights& w,
                              const std::vector<MetricHook>& hooks = {});

/// Frozen upstream checkpoints.
struct BranchCheckpoints {
  const nn::Checkpoint* encoder = nullptr;
  const nn::Checkpoint* adapter = nullptr;
  const nn::Checkpoint* vocoder = nullptr;
  const nn::Checkpoint* predictor = nullptr;
};

struct BranchOutputs {
  AudioBuffer generative;
  AudioBuffer predictive;
};

/// The two 16 kHz branches, loaded read-only.
class Branches {
 public:
  /// Errors: MissingDependency for an absent checkpoint; ConfigMismatch for
  /// incompatible widths.
  explicit Branches(const BranchCheckpoints& ckpts);
  /// Errors: RateMismatch unless 16 kHz. `parallel` runs the branches on two
  /// threads; results are identical either way.
  BranchOutputs Run(const AudioBuffer& x16, bool parallel = false) const;

  const encoder::Encoder& encoder() const { return *encoder_; }

 private:
  std::unique_ptr<encoder::Encoder> encoder_;
  std::unique_ptr<gen::Adapter> adapter_;
  std::unique_ptr<gen::Vocoder> vocoder_;
  std::unique_ptr<predictor::Predictor> predictor_;
};

struct PostNetTrainConfig {
  PostNetConfig model;
  gen::DiscriminatorSuiteConfig disc;
  gen::GanLossWeights weights;
  bool operator==(const PostNetTrainConfig&) const = default;
};

void to_json(nlohmann::json& j, const PostNetTrainConfig& c);
void from_json(const nlohmann::json& j, PostNetTrainConfig& c);

struct PostNetTrainPair {
  AudioBuffer degraded;  // 16 kHz, N samples
  AudioBuffer clean;     // 48 kHz, 3N samples
};

/// Trains the post-network on frozen branch outputs with 1:1 alternating
/// generator/discriminator updates; the tracked loss is the mel term.
/// Errors: MissingDependency; NoData; RateMismatch; ShapeMismatch.
nn::TrainResult TrainPostNet(const std::vector<PostNetTrainPair>& pairs,
                             const BranchCheckpoints& branches, const PostNetTrainConfig& cfg,
                             const nn::TrainOptions& opt,
                             const std::vector<MetricHook>& hooks = {});

/// Errors: ConfigMismatch.
std::unique_ptr<PostNet> LoadPostNet(const nn::Checkpoint& ckpt);

}  // namespace fse::postnet

#endif  // FSE_POSTNET_POSTNET_H_
