// include/fse/pipeline/size.h

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

#ifndef FSE_PIPELINE_SIZE_H_
#define FSE_PIPELINE_SIZE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fse/pipeline/config.h"

namespace fse::pipeline {

/// Multiply-accumulate counts per layer type. Norms, activations, FFTs and
/// resampling are not counted.
namespace macs {

std::uint64_t Linear(std::uint64_t rows, std::uint64_t in, std::uint64_t out);
/// out_ch * t_out * (in_ch / groups) * kernel.
std::uint64_t Conv1d(std::uint64_t in_ch, std::uint64_t out_ch, std::uint64_t kernel,
                     std::uint64_t t_out, std::uint64_t groups = 1);
/// One direction: batch * len * 4H * (in + H).
std::uint64_t Lstm(std::uint64_t batch, std::uint64_t len, std::uint64_t in,
                   std::uint64_t hidden);
/// Scores plus context: 2 * batch * len^2 * dim.
std::uint64_t AttentionCore(std::uint64_t batch, std::uint64_t len, std::uint64_t dim);

std::uint64_t Encoder(const encoder::EncoderConfig& c, std::uint64_t n16);
std::uint64_t Backbone(const gen::BackboneConfig& c, std::uint64_t frames);
std::uint64_t Adapter(const gen::BackboneConfig& c, std::uint64_t frames);
std::uint64_t Vocoder(const gen::BackboneConfig& c, std::uint64_t frames);
std::uint64_t DualPathCore(std::uint64_t frames, std::uint64_t bins, std::uint64_t in,
                           std::uint64_t out, const predictor::PredictorConfig& c);
std::uint64_t Predictor(const predictor::PredictorConfig& c, std::uint64_t n16);
std::uint64_t PostNet(const postnet::PostNetConfig& c, std::uint64_t n16);

}  // namespace macs

struct ComponentSize {
  std::string name;
  std::uint64_t params = 0;
  /// Per second of 16 kHz input; the post-network runs at 48 kHz inside.
  std::uint64_t macs = 0;
};

struct SizeReport {
  std::vector<ComponentSize> components;
  std::uint64_t total_params() const;
  std::uint64_t total_macs() const;
  /// Table with a reference line for the published parameter count.
  std::string Render(bool with_reference) const;
};

/// Parameter totals are exact sums over named tensors of each component,
/// built one at a time; MACs are analytic for 1 s of 16 kHz input.
/// Errors: ConfigError.
SizeReport CountParamsAndMacs(const RunConfig& cfg);

/// Published total for the full-size system, in parameters.
inline constexpr double kReferenceParams = 567.76e6;
inline constexpr double kReferenceGmacs = 472.84;

}  // namespace fse::pipeline

#endif  // FSE_PIPELINE_SIZE_H_
