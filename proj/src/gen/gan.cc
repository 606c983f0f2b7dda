// src/gen/gan.cc

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

#include "fse/gen/gan.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fse/dsp/stft_json.h"
#include "fse/error.h"

namespace fse::gen {
namespace {

constexpr double kSlope = 0.1;

nn::Conv2dOptions Conv2dOpts(std::size_t sh, std::size_t sw, std::size_t ph, std::size_t pw) {
  nn::Conv2dOptions o;
  o.stride_h = sh;
  o.stride_w = sw;
  o.pad_h = ph;
  o.pad_w = pw;
  return o;
}

nn::Conv1dOptions Conv1dOpts(std::size_t pad, std::size_t dilation) {
  nn::Conv1dOptions o;
  o.pad_left = o.pad_right = pad;
  o.dilation = dilation;
  return o;
}

template <typename Layers>
DiscOutput RunStack(nn::Tensor h, const Layers& convs) {
  DiscOutput out;
  out.features.emplace_back();
  for (std::size_t i = 0; i + 1 < convs.size(); ++i) {
    h = nn::LeakyRelu((*convs[i])(h), kSlope);
    out.features.back().push_back(h);
  }
  out.logits.push_back((*convs.back())(h));
  return out;
}

}  // namespace

std::vector<StftConfig> DiscriminatorSuiteConfig::DefaultResolutions() {
  std::vector<StftConfig> r;
  for (int fft : {512, 1024, 2048}) {
    StftConfig c;
    c.fft_size = fft;
    c.hop_size = fft / 4;
    r.push_back(c);
  }
  return r;
}

void DiscriminatorSuiteConfig::Validate() const {
  std::set<int> seen;
  for (int p : mpd_periods) {
    if (p < 1) throw Error(ErrorKind::kConfigError, "MPD periods must be positive");
    if (!seen.insert(p).second)
      throw Error(ErrorKind::kConfigError, "MPD periods must be pairwise distinct");
  }
  if (stft_disc_resolutions.size() < 2)
    throw Error(ErrorKind::kConfigError, "need at least 2 STFT discriminator resolutions");
  for (const auto& r : stft_disc_resolutions) {
    r.Validate();
    if (stft_disc_bands == 0 || stft_disc_bands > static_cast<std::size_t>(r.num_bins()))
      throw Error(ErrorKind::kConfigError, "STFT discriminator band count out of range");
  }
  if (repr_disc_dims == 0 || channels == 0)
    throw Error(ErrorKind::kConfigError, "discriminator widths must be positive");
}

void to_json(nlohmann::json& j, const DiscriminatorSuiteConfig& c) {
  j = {{"mpd_periods", c.mpd_periods},
       {"stft_disc_resolutions", c.stft_disc_resolutions},
       {"stft_disc_bands", c.stft_disc_bands},
       {"repr_disc_dims", c.repr_disc_dims},
       {"channels", c.channels},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, DiscriminatorSuiteConfig& c) {
  c.mpd_periods = j.value("mpd_periods", c.mpd_periods);
  if (j.contains("stft_disc_resolutions"))
    c.stft_disc_resolutions = j["stft_disc_resolutions"].get<std::vector<StftConfig>>();
  c.stft_disc_bands = j.value("stft_disc_bands", c.stft_disc_bands);
  c.repr_disc_dims = j.value("repr_disc_dims", c.repr_disc_dims);
  c.channels = j.value("channels", c.channels);
  c.seed = j.value("seed", c.seed);
}

void DiscOutput::Append(DiscOutput other) {
  for (auto& l : other.logits) logits.push_back(std::move(l));
  for (auto& f : other.features) features.push_back(std::move(f));
}

nn::Tensor MpdFold(const nn::Tensor& x, std::size_t period) {
  if (x.rank() != 1 || x.dim(0) == 0)
    throw Error(ErrorKind::kShapeMismatch, "MPD expects a non-empty waveform [N]");
  const std::size_t n = x.dim(0);
  const std::size_t rows = (n + period - 1) / period;
  nn::Tensor padded = rows * period == n
                          ? x
                          : nn::Pad(x, 0, rows * period - n, nn::PadMode::kReflect);
  return nn::Reshape(padded, {1, 1, rows, period});
}

PeriodDiscriminator::PeriodDiscriminator(std::size_t period, std::size_t channels,
                                         nn::Initializer& init)
    : period_(period) {
  const std::size_t widths[] = {1, channels, 2 * channels, 2 * channels};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t stride = i < 2 ? 3 : 1;
    convs_.push_back(std::make_unique<nn::Conv2dLayer>(widths[i], widths[i + 1], 5, 1,
                                                       Conv2dOpts(stride, 1, 2, 0), init));
  }
  convs_.push_back(std::make_unique<nn::Conv2dLayer>(2 * channels, 1, 3, 1,
                                                     Conv2dOpts(1, 1, 1, 0), init));
  for (std::size_t i = 0; i < convs_.size(); ++i)
    AddModule("conv" + std::to_string(i), *convs_[i]);
}

DiscOutput PeriodDiscriminator::operator()(const nn::Tensor& x) const {
  return RunStack(MpdFold(x, period_), convs_);
}

StftDiscriminator::StftDiscriminator(const StftConfig& cfg, std::size_t bands,
                                     std::size_t channels, nn::Initializer& init)
    : cfg_(cfg) {
  const auto bins = static_cast<std::size_t>(cfg.num_bins());
  const std::size_t width = bins / bands;
  for (std::size_t b = 0; b < bands; ++b) {
    Band band;
    band.start = b * width;
    band.width = b + 1 == bands ? bins - band.start : width;
    band.convs.push_back(std::make_unique<nn::Conv2dLayer>(2, channels, 3, 9,
                                                           Conv2dOpts(1, 1, 1, 4), init));
    band.convs.push_back(std::make_unique<nn::Conv2dLayer>(channels, channels, 3, 9,
                                                           Conv2dOpts(1, 2, 1, 4), init));
    band.convs.push_back(std::make_unique<nn::Conv2dLayer>(channels, channels, 3, 3,
                                                           Conv2dOpts(1, 1, 1, 1), init));
    band.convs.push_back(std::make_unique<nn::Conv2dLayer>(channels, 1, 3, 3,
                                                           Conv2dOpts(1, 1, 1, 1), init));
    bands_.push_back(std::move(band));
  }
  for (std::size_t b = 0; b < bands_.size(); ++b)
    for (std::size_t i = 0; i < bands_[b].convs.size(); ++i)
      AddModule("band" + std::to_string(b) + ".conv" + std::to_string(i), *bands_[b].convs[i]);
}

DiscOutput StftDiscriminator::operator()(const nn::Tensor& x) const {
  nn::Tensor s = nn::StftOp(x, cfg_);  // [T, K, 2]
  const std::size_t frames = s.dim(0), bins = s.dim(1);
  nn::Tensor planes = nn::Reshape(nn::Permute(s, {2, 0, 1}), {1, 2, frames, bins});
  DiscOutput out;
  for (const auto& band : bands_)
    out.Append(RunStack(nn::Slice(planes, 3, band.start, band.width), band.convs));
  return out;
}

RepresentationDiscriminator::RepresentationDiscriminator(std::size_t dims, std::size_t channels,
                                                         nn::Initializer& init)
    : dims_(dims) {
  const std::size_t c = 4 * channels;
  convs_.push_back(std::make_unique<nn::Conv1dLayer>(dims, c, 5, Conv1dOpts(2, 1), init));
  convs_.push_back(std::make_unique<nn::Conv1dLayer>(c, c, 5, Conv1dOpts(4, 2), init));
  convs_.push_back(std::make_unique<nn::Conv1dLayer>(c, 1, 3, Conv1dOpts(1, 1), init));
  for (std::size_t i = 0; i < convs_.size(); ++i)
    AddModule("conv" + std::to_string(i), *convs_[i]);
}

DiscOutput RepresentationDiscriminator::operator()(const nn::Tensor& r) const {
  if (r.rank() != 2 || r.dim(1) != dims_)
    throw Error(ErrorKind::kShapeMismatch, "representation discriminator expects [F, " +
                                               std::to_string(dims_) + "]");
  return RunStack(nn::Reshape(nn::Permute(r, {1, 0}), {1, dims_, r.dim(0)}), convs_);
}

void DiscriminatorSuite::AudioFamilies::Register() {
  for (std::size_t i = 0; i < mpd.size(); ++i) AddModule("mpd" + std::to_string(i), *mpd[i]);
  for (std::size_t i = 0; i < stft.size(); ++i) AddModule("stft" + std::to_string(i), *stft[i]);
}

DiscriminatorSuite::DiscriminatorSuite(const DiscriminatorSuiteConfig& cfg)
    : cfg_((cfg.Validate(), cfg)), init_(cfg.seed) {
  for (int p : cfg.mpd_periods)
    audio_.mpd.push_back(
        std::make_unique<PeriodDiscriminator>(static_cast<std::size_t>(p), cfg.channels, init_));
  for (const auto& r : cfg.stft_disc_resolutions)
    audio_.stft.push_back(
        std::make_unique<StftDiscriminator>(r, cfg.stft_disc_bands, cfg.channels, init_));
  audio_.Register();
  repr_ = std::make_unique<RepresentationDiscriminator>(cfg.repr_disc_dims, cfg.channels, init_);
  AddModule("audio", audio_);
  AddModule("repr", *repr_);
}

DiscOutput DiscriminatorSuite::Discriminate(const DiscriminatorInput& in,
                                            DiscFamily family) const {
  const bool wants_audio = family != DiscFamily::kRepresentation;
  const bool is_audio = in.kind == InputKind::kAudio;
  if (wants_audio != is_audio)
    throw Error(ErrorKind::kTypeMismatch,
                wants_audio ? "waveform discriminators need audio input"
                            : "representation discriminator needs a matrix input");
  if (in.data.rank() != (is_audio ? 1u : 2u))
    throw Error(ErrorKind::kTypeMismatch, "input tensor rank does not match its declared kind");
  DiscOutput out;
  if (family == DiscFamily::kRepresentation) return (*repr_)(in.data);
  if (family != DiscFamily::kStft)
    for (const auto& d : audio_.mpd) out.Append((*d)(in.data));
  if (family != DiscFamily::kPeriod)
    for (const auto& d : audio_.stft) out.Append((*d)(in.data));
  return out;
}

DiscOutput DiscriminatorSuite::Discriminate(const DiscriminatorInput& in) const {
  return Discriminate(in, in.kind == InputKind::kAudio ? DiscFamily::kAudio
                                                       : DiscFamily::kRepresentation);
}

nn::Tensor LsganDiscriminatorLoss(const DiscOutput& real, const DiscOutput& fake) {
  if (real.logits.size() != fake.logits.size())
    throw Error(ErrorKind::kShapeMismatch, "real/fake logit counts differ");
  nn::Tensor total = nn::Tensor::Scalar(0.0);
  for (std::size_t i = 0; i < real.logits.size(); ++i) {
    total = nn::Add(total, nn::Mean(nn::Square(nn::AddScalar(real.logits[i], -1.0))));
    total = nn::Add(total, nn::Mean(nn::Square(fake.logits[i])));
  }
  return total;
}

nn::Tensor LsganGeneratorLoss(const DiscOutput& fake) {
  nn::Tensor total = nn::Tensor::Scalar(0.0);
  for (const auto& l : fake.logits)
    total = nn::Add(total, nn::Mean(nn::Square(nn::AddScalar(l, -1.0))));
  return total;
}

nn::Tensor FeatureMatchingLoss(const DiscOutput& real, const DiscOutput& fake) {
  if (real.features.size() != fake.features.size())
    throw Error(ErrorKind::kShapeMismatch, "real/fake feature counts differ");
  nn::Tensor total = nn::Tensor::Scalar(0.0);
  for (std::size_t i = 0; i < real.features.size(); ++i) {
    if (real.features[i].size() != fake.features[i].size())
      throw Error(ErrorKind::kShapeMismatch, "real/fake feature depths differ");
    for (std::size_t j = 0; j < real.features[i].size(); ++j)
      total = nn::Add(total, nn::L1Loss(fake.features[i][j], real.features[i][j].Detach()));
  }
  return total;
}

MultiScaleMelLoss::MultiScaleMelLoss(int sample_rate) : sample_rate_(sample_rate) {
  for (int fft : {256, 512, 1024, 2048}) {
    StftConfig c;
    c.fft_size = fft;
    c.hop_size = fft / 4;
    scales_.push_back(c);
    banks_.push_back(MelFilterbank::Build(fft / 16, fft, sample_rate));
    const auto& w = banks_.back().weights;
    fb_.push_back(nn::Tensor::FromData({w.rows, w.cols}, w.data));
  }
}

nn::Tensor MultiScaleMelLoss::LogMel(const nn::Tensor& x, std::size_t i) const {
  nn::Tensor s = nn::StftOp(x, scales_.at(i));
  const std::size_t frames = s.dim(0), bins = s.dim(1);
  nn::Tensor power = nn::Reshape(
      nn::Add(nn::Square(nn::Slice(s, 2, 0, 1)), nn::Square(nn::Slice(s, 2, 1, 1))),
      {frames, bins});
  return nn::Log(nn::AddScalar(nn::Linear(power, fb_[i], nn::Tensor()), kLogMelFloor));
}

nn::Tensor MultiScaleMelLoss::operator()(const nn::Tensor& y_hat, const nn::Tensor& y) const {
  if (y_hat.shape() != y.shape() || y.rank() != 1)
    throw Error(ErrorKind::kShapeMismatch, "mel loss needs equal-length waveforms");
  nn::Tensor total = nn::Tensor::Scalar(0.0);
  for (std::size_t i = 0; i < scales_.size(); ++i)
    total = nn::Add(total, nn::L1Loss(LogMel(y_hat, i), LogMel(y, i)));
  return total;
}

void to_json(nlohmann::json& j, const GanLossWeights& w) {
  j = {{"mel", w.mel}, {"adv", w.adv}, {"fm", w.fm}};
}

void from_json(const nlohmann::json& j, GanLossWeights& w) {
  w.mel = j.value("mel", w.mel);
  w.adv = j.value("adv", w.adv);
  w.fm = j.value("fm", w.fm);
}

namespace {

// Adds the adversarial and feature-matching terms for one family.
void AddGanTerms(const DiscriminatorSuite& suite, const DiscriminatorInput& real,
                 const DiscriminatorInput& fake, const GanLossWeights& w,
                 LossBreakdown* out) {
  if (w.adv == 0.0 && w.fm == 0.0) {
    out->terms.push_back({"adv", 0.0});
    out->terms.push_back({"fm", 0.0});
    return;
  }
  const DiscOutput d_real = suite.Discriminate(real);
  const DiscOutput d_fake = suite.Discriminate(fake);
  nn::Tensor adv = LsganGeneratorLoss(d_fake);
  nn::Tensor fm = FeatureMatchingLoss(d_real, d_fake);
  out->total = nn::Add(out->total, nn::Add(nn::Scale(adv, w.adv), nn::Scale(fm, w.fm)));
  out->terms.push_back({"adv", adv.item()});
  out->terms.push_back({"fm", fm.item()});
}

}  // namespace

LossBreakdown AdapterLoss(const nn::Tensor& r_a_hat, const nn::Tensor& r_a_teacher,
                          const DiscriminatorSuite& suite, const GanLossWeights& w) {
  if (r_a_hat.shape() != r_a_teacher.shape() || r_a_hat.rank() != 2)
    throw Error(ErrorKind::kShapeMismatch, "adapter output " + nn::ShapeString(r_a_hat.shape()) +
                                               " vs teacher " +
                                               nn::ShapeString(r_a_teacher.shape()));
  LossBreakdown out;
  nn::Tensor mse = nn::MseLoss(r_a_hat, r_a_teacher);
  out.total = mse;
  out.terms.push_back({"mse", mse.item()});
  AddGanTerms(suite, DiscriminatorInput::Representation(r_a_teacher),
              DiscriminatorInput::Representation(r_a_hat), w, &out);
  out.terms.push_back({"total", out.total.item()});
  return out;
}

LossBreakdown VocoderLoss(const nn::Tensor& y_hat, const nn::Tensor& y,
                          const DiscriminatorSuite& suite, const MultiScaleMelLoss& mel,
                          const GanLossWeights& w) {
  if (y_hat.shape() != y.shape() || y.rank() != 1)
    throw Error(ErrorKind::kShapeMismatch, "vocoder loss needs equal-length waveforms, got " +
                                               nn::ShapeString(y_hat.shape()) + " and " +
                                               nn::ShapeString(y.shape()));
  LossBreakdown out;
  nn::Tensor m = mel(y_hat, y);
  out.total = nn::Scale(m, w.mel);
  out.terms.push_back({"mel", m.item()});
  AddGanTerms(suite, DiscriminatorInput::Audio(y), DiscriminatorInput::Audio(y_hat), w, &out);
  out.terms.push_back({"total", out.total.item()});
  return out;
}

LossBreakdown VocoderLoss(const AudioBuffer& y_hat, const AudioBuffer& y,
                          const DiscriminatorSuite& suite, const GanLossWeights& w) {
  if (y_hat.sample_rate != y.sample_rate)
    throw Error(ErrorKind::kRateMismatch, "vocoder loss inputs differ in rate");
  if (y_hat.size() != y.size())
    throw Error(ErrorKind::kShapeMismatch, "vocoder loss inputs differ in length");
  const MultiScaleMelLoss mel(y.sample_rate);
  return VocoderLoss(nn::Tensor::FromData({y_hat.size()}, y_hat.samples),
                     nn::Tensor::FromData({y.size()}, y.samples), suite, mel, w);
}

}  // namespace fse::gen
