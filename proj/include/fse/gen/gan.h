// include/fse/gen/gan.h

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

#ifndef FSE_GEN_GAN_H_
#define FSE_GEN_GAN_H_

#include <memory>
#include <string>
#include <vector>

#include "fse/dsp/audio.h"
#include "fse/dsp/mel.h"
#include "fse/dsp/stft.h"
#include "fse/nn/layers.h"
#include "fse/nn/train.h"
#include "json.hpp"

namespace fse::gen {

struct DiscriminatorSuiteConfig {
  std::vector<int> mpd_periods{2, 3, 5, 7, 11};
  std::vector<StftConfig> stft_disc_resolutions = DefaultResolutions();
  std::size_t stft_disc_bands = 3;
  std::size_t repr_disc_dims = 192;
  std::size_t channels = 8;
  std::uint64_t seed = 21;

  /// fft {512, 1024, 2048}, hop fft/4.
  static std::vector<StftConfig> DefaultResolutions();
  /// Errors: ConfigError.
  void Validate() const;
  bool operator==(const DiscriminatorSuiteConfig&) const = default;
};

void to_json(nlohmann::json& j, const DiscriminatorSuiteConfig& c);
void from_json(const nlohmann::json& j, DiscriminatorSuiteConfig& c);

enum class InputKind { kAudio, kRepresentation };

struct DiscriminatorInput {
  InputKind kind;
  nn::Tensor data;  // audio [N] or representation [F, D]

  static DiscriminatorInput Audio(nn::Tensor x) { return {InputKind::kAudio, std::move(x)}; }
  static DiscriminatorInput Representation(nn::Tensor r) {
    return {InputKind::kRepresentation, std::move(r)};
  }
};

/// One logit map per sub-discriminator and, for each, its intermediate
/// activations.
struct DiscOutput {
  std::vector<nn::Tensor> logits;
  std::vector<std::vector<nn::Tensor>> features;

  void Append(DiscOutput other);
};

/// Reflect-pads x [N] to ceil(N / p) * p samples and folds it to
/// [1, 1, ceil(N / p), p].
nn::Tensor MpdFold(const nn::Tensor& x, std::size_t period);

class PeriodDiscriminator : public nn::Module {
 public:
  PeriodDiscriminator(std::size_t period, std::size_t channels, nn::Initializer& init);
  DiscOutput operator()(const nn::Tensor& x) const;
  std::size_t period() const { return period_; }

 private:
  std::size_t period_;
  std::vector<std::unique_ptr<nn::Conv2dLayer>> convs_;
  std::unique_ptr<nn::Conv2dLayer> post_;
};

/// Complex STFT split into uniform bin bands, one conv stack per band.
class StftDiscriminator : public nn::Module {
 public:
  StftDiscriminator(const StftConfig& cfg, std::size_t bands, std::size_t channels,
                    nn::Initializer& init);
  DiscOutput operator()(const nn::Tensor& x) const;

 private:
  struct Band {
    std::size_t start, width;
    std::vector<std::unique_ptr<nn::Conv2dLayer>> convs;
  };
  StftConfig cfg_;
  std::vector<Band> bands_;
};

/// 1-D conv stack over the frame axis of a representation [F, D].
class RepresentationDiscriminator : public nn::Module {
 public:
  RepresentationDiscriminator(std::size_t dims, std::size_t channels, nn::Initializer& init);
  DiscOutput operator()(const nn::Tensor& r) const;

 private:
  std::size_t dims_;
  std::vector<std::unique_ptr<nn::Conv1dLayer>> convs_;
};

enum class DiscFamily { kPeriod, kStft, kAudio, kRepresentation };

class DiscriminatorSuite : public nn::Module {
 public:
  explicit DiscriminatorSuite(const DiscriminatorSuiteConfig& cfg);
  const DiscriminatorSuiteConfig& config() const { return cfg_; }

  /// Errors: TypeMismatch when the input kind does not fit the family.
  DiscOutput Discriminate(const DiscriminatorInput& in, DiscFamily family) const;
  /// Audio goes to both waveform families, representations to the
  /// representation discriminator.
  DiscOutput Discriminate(const DiscriminatorInput& in) const;

  nn::Module& audio_part() { return audio_; }
  nn::Module& representation_part() { return *repr_; }

 private:
  struct AudioFamilies : nn::Module {
    std::vector<std::unique_ptr<PeriodDiscriminator>> mpd;
    std::vector<std::unique_ptr<StftDiscriminator>> stft;
    void Register();
  };
  DiscriminatorSuiteConfig cfg_;
  nn::Initializer init_;
  AudioFamilies audio_;
  std::unique_ptr<RepresentationDiscriminator> repr_;
};

/// Least-squares objectives summed over logit maps.
nn::Tensor LsganDiscriminatorLoss(const DiscOutput& real, const DiscOutput& fake);
nn::Tensor LsganGeneratorLoss(const DiscOutput& fake);
/// Sum over all feature maps of L1 against the detached real features.
nn::Tensor FeatureMatchingLoss(const DiscOutput& real, const DiscOutput& fake);

/// Log-mel L1 summed over fft {256, 512, 1024, 2048}, hop fft/4,
/// n_mels fft/16.
class MultiScaleMelLoss {
 public:
  explicit MultiScaleMelLoss(int sample_rate);
  int sample_rate() const { return sample_rate_; }
  const std::vector<StftConfig>& scales() const { return scales_; }
  const std::vector<MelFilterbank>& filterbanks() const { return banks_; }
  /// Differentiable log-mel spectrogram [frames, n_mels] at scale i.
  nn::Tensor LogMel(const nn::Tensor& x, std::size_t i) const;
  /// Errors: ShapeMismatch on length mismatch.
  nn::Tensor operator()(const nn::Tensor& y_hat, const nn::Tensor& y) const;

 private:
  int sample_rate_;
  std::vector<StftConfig> scales_;
  std::vector<MelFilterbank> banks_;
  std::vector<nn::Tensor> fb_;
};

struct GanLossWeights {
  double mel = 15.0;
  double adv = 1.0;
  double fm = 2.0;
  bool operator==(const GanLossWeights&) const = default;
};

void to_json(nlohmann::json& j, const GanLossWeights& w);
void from_json(const nlohmann::json& j, GanLossWeights& w);

using nn::LossBreakdown;

/// mse + adv * LSGAN(repr disc) + fm * feature matching. The `mel` weight
/// is ignored. Errors: ShapeMismatch.
LossBreakdown AdapterLoss(const nn::Tensor& r_a_hat, const nn::Tensor& r_a_teacher,
                          const DiscriminatorSuite& suite, const GanLossWeights& w);

/// mel * multi-scale mel + adv * LSGAN(MPD + STFT disc) + fm * feature
/// matching. Errors: ShapeMismatch on length mismatch.
LossBreakdown VocoderLoss(const nn::Tensor& y_hat, const nn::Tensor& y,
                          const DiscriminatorSuite& suite, const MultiScaleMelLoss& mel,
                          const GanLossWeights& w);
/// Errors: RateMismatch, ShapeMismatch.
LossBreakdown VocoderLoss(const AudioBuffer& y_hat, const AudioBuffer& y,
                          const DiscriminatorSuite& suite, const GanLossWeights& w);

}  // namespace fse::gen

#endif  // FSE_GEN_GAN_H_
