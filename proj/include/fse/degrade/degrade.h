// include/fse/degrade/degrade.h

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

#ifndef FSE_DEGRADE_DEGRADE_H_
#define FSE_DEGRADE_DEGRADE_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fse/dsp/audio.h"
#include "json.hpp"

namespace fse::degrade {

/// Errors: RateMismatch for differing rates; DegenerateInput when either
/// signal is empty or has zero power. Noise is tiled or trimmed to the
/// speech length.
AudioBuffer MixAtSnr(const AudioBuffer& speech, const AudioBuffer& noise,
                     double snr_db);

/// Gain applied to the noise by MixAtSnr.
double SnrGain(double speech_power, double noise_power, double snr_db);

struct RoomImpulseResponse {
  std::vector<double> taps;
  int sample_rate = 16000;
  double target_rt60_s = 0.0;
};

/// Unit direct path followed by Gaussian noise under an exp(-t ln(1000)/rt60)
/// envelope, scaled so the tail never exceeds half the direct path.
/// Errors: InvalidParameter when rt60_s <= 0, length_s < rt60_s or rate <= 0.
RoomImpulseResponse SynthesizeRir(double rt60_s, double length_s, int rate,
                                  std::uint64_t seed);

/// Schroeder backward integration with a least-squares line over the
/// -5 dB .. -35 dB span of the decay curve, extrapolated to -60 dB.
double EstimateRt60(const RoomImpulseResponse& rir);

/// Full convolution truncated to len(x), rescaled to the input peak.
/// Errors: RateMismatch.
AudioBuffer ApplyReverb(const AudioBuffer& x, const RoomImpulseResponse& rir);

/// Clamp to +-eta * max|x|. Errors: InvalidParameter unless 0 < eta <= 1.
AudioBuffer Clip(const AudioBuffer& x, double eta);

/// Down-resample to 2 * bandwidth_hz and back; the length is preserved.
/// Errors: InvalidParameter unless 0 < bandwidth_hz <= rate / 2.
AudioBuffer Bandlimit(const AudioBuffer& x, int bandwidth_hz);

struct DegradationRecipe {
  std::uint64_t seed = 0;
  std::optional<double> snr_db;
  std::optional<double> rt60_s;
  std::optional<double> clip_eta;
  std::optional<int> bandwidth_hz;
  std::optional<std::vector<std::size_t>> loss_frames;
  // Filled in by ApplyRecipe.
  std::optional<double> rir_length_s;
  std::optional<std::size_t> loss_frame_size;

  bool has_packet_loss() const { return loss_frames && !loss_frames->empty(); }
  bool has_bandlimit() const { return bandwidth_hz.has_value(); }
  /// Errors: InvalidParameter when no distortion is present or a field is
  /// out of range.
  void Validate() const;

  bool operator==(const DegradationRecipe&) const = default;
};

nlohmann::json RecipeToJson(const DegradationRecipe& r);
DegradationRecipe RecipeFromJson(const nlohmann::json& j);

/// Applies reverb, noise, clipping, bandlimiting and packet loss, in that
/// order, for whichever fields are present. Returns the degraded audio and
/// the recipe with derived fields resolved.
std::pair<AudioBuffer, DegradationRecipe> ApplyRecipe(
    const AudioBuffer& x, const DegradationRecipe& r,
    const AudioBuffer& noise_source);

/// Ranges for drawing random recipes. These are configurable defaults.
struct SamplerConfig {
  double p_noise = 0.9;
  double snr_min_db = -5.0, snr_max_db = 20.0;
  double p_reverb = 0.3;
  double rt60_min_s = 0.6, rt60_max_s = 1.6;
  double p_clip = 0.2;
  double clip_min = 0.3, clip_max = 0.9;
  double p_bandlimit = 0.2;
  std::vector<int> bandwidths_hz = {2000, 4000, 8000, 11025, 12000, 16000, 22050};
  double p_loss = 0.1;
  double loss_rate = 0.05;

  static SamplerConfig FromJson(const nlohmann::json& j);
};

/// Draws a valid recipe from the seed for a signal of n samples at rate.
DegradationRecipe SampleRecipe(const SamplerConfig& cfg, std::uint64_t seed,
                               std::size_t n, int rate);

}  // namespace fse::degrade

#endif  // FSE_DEGRADE_DEGRADE_H_
