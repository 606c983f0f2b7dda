// src/degrade/degrade.cc

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

#include "fse/degrade/degrade.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "fse/dsp/fft.h"
#include "fse/dsp/resample.h"
#include "fse/error.h"
#include "fse/plc/plc.h"

namespace fse::degrade {
namespace {

std::vector<double> TileTo(const std::vector<double>& v, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i % v.size()];
  return out;
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> Convolve(const std::vector<double>& x,
                             const std::vector<double>& h, std::size_t keep) {
  std::vector<double> y(keep, 0.0);
  if (h.size() <= 64) {
    for (std::size_t i = 0; i < keep; ++i) {
      double s = 0.0;
      const std::size_t kmax = std::min(h.size(), i + 1);
      for (std::size_t k = 0; k < kmax; ++k) s += h[k] * x[i - k];
      y[i] = s;
    }
    return y;
  }
  const std::size_t n = NextPow2(x.size() + h.size() - 1);
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(h.begin(), h.end(), b.begin());
  std::vector<std::complex<double>> fa(n / 2 + 1), fb(n / 2 + 1);
  dsp::Rfft(a, fa);
  dsp::Rfft(b, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  dsp::Irfft(fa, c);
  std::copy_n(c.begin(), keep, y.begin());
  return y;
}

}  // namespace

double SnrGain(double speech_power, double noise_power, double snr_db) {
  return std::sqrt(speech_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
}

AudioBuffer MixAtSnr(const AudioBuffer& speech, const AudioBuffer& noise,
                     double snr_db) {
  ValidateAudio(speech);
  ValidateAudio(noise);
  if (speech.sample_rate != noise.sample_rate)
    throw Error(ErrorKind::kRateMismatch, "speech and noise rates differ");
  if (!std::isfinite(snr_db)) throw Error(ErrorKind::kInvalidParameter, "snr not finite");
  const auto n = TileTo(noise.samples, speech.size());
  const double ps = MeanPower(speech.samples), pn = MeanPower(n);
  if (ps <= 0.0) throw Error(ErrorKind::kDegenerateInput, "speech has zero power");
  if (pn <= 0.0) throw Error(ErrorKind::kDegenerateInput, "noise has zero power");
  const double alpha = SnrGain(ps, pn, snr_db);
  AudioBuffer out = speech;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += alpha * n[i];
  return out;
}

RoomImpulseResponse SynthesizeRir(double rt60_s, double length_s, int rate,
                                  std::uint64_t seed) {
  if (!(rt60_s > 0.0)) throw Error(ErrorKind::kInvalidParameter, "rt60 must be positive");
  if (!(length_s >= rt60_s))
    throw Error(ErrorKind::kInvalidParameter, "rir length shorter than rt60");
  if (rate <= 0) throw Error(ErrorKind::kInvalidParameter, "rate must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(length_s * rate));
  RoomImpulseResponse rir;
  rir.sample_rate = rate;
  rir.target_rt60_s = rt60_s;
  rir.taps.assign(n, 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const double decay = std::log(1000.0) / rt60_s;
  double peak = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    rir.taps[i] = g(rng) * std::exp(-decay * static_cast<double>(i) / rate);
    peak = std::max(peak, std::abs(rir.taps[i]));
  }
  if (peak > 0.0)
    for (std::size_t i = 1; i < n; ++i) rir.taps[i] *= 0.5 / peak;
  rir.taps[0] = 1.0;
  return rir;
}

double EstimateRt60(const RoomImpulseResponse& rir) {
  const auto& h = rir.taps;
  if (h.empty() || rir.sample_rate <= 0)
    throw Error(ErrorKind::kDegenerateInput, "empty impulse response");
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) throw Error(ErrorKind::kDegenerateInput, "silent impulse response");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double db = 10.0 * std::log10(edc[i] / acc);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    const double t = static_cast<double>(i) / rir.sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (count < 2) throw Error(ErrorKind::kDegenerateInput, "decay range too short");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (slope >= 0.0) throw Error(ErrorKind::kDegenerateInput, "non-decaying response");
  return -60.0 / slope;
}

AudioBuffer ApplyReverb(const AudioBuffer& x, const RoomImpulseResponse& rir) {
  ValidateAudio(x);
  if (x.sample_rate != rir.sample_rate)
    throw Error(ErrorKind::kRateMismatch, "signal and impulse response rates differ");
  if (rir.taps.empty()) throw Error(ErrorKind::kDegenerateInput, "empty impulse response");
  AudioBuffer out(Convolve(x.samples, rir.taps, x.size()), x.sample_rate);
  const double before = PeakAbs(x.samples), after = PeakAbs(out.samples);
  if (after > 0.0 && before > 0.0 && after != before)
    for (double& v : out.samples) v *= before / after;
  return out;
}

AudioBuffer Clip(const AudioBuffer& x, double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw Error(ErrorKind::kInvalidParameter, "clip eta must lie in (0, 1]");
  ValidateAudio(x, true);
  if (eta == 1.0) return x;
  const double c = eta * PeakAbs(x.samples);
  AudioBuffer out = x;
  for (double& v : out.samples) v = std::clamp(v, -c, c);
  return out;
}

AudioBuffer Bandlimit(const AudioBuffer& x, int bandwidth_hz) {
  if (bandwidth_hz <= 0 || 2L * bandwidth_hz > x.sample_rate)
    throw Error(ErrorKind::kInvalidParameter,
                "bandwidth must lie in (0, " + std::to_string(x.sample_rate / 2) + "]");
  ValidateAudio(x);
  if (2 * bandwidth_hz == x.sample_rate) return x;
  AudioBuffer y = Resample(Resample(x, 2 * bandwidth_hz), x.sample_rate);
  y.samples.resize(x.size(), 0.0);
  return y;
}

void DegradationRecipe::Validate() const {
  if (!snr_db && !rt60_s && !clip_eta && !bandwidth_hz && !has_packet_loss())
    throw Error(ErrorKind::kInvalidParameter, "recipe has no distortion");
  if (snr_db && !std::isfinite(*snr_db))
    throw Error(ErrorKind::kInvalidParameter, "snr not finite");
  if (rt60_s && !(*rt60_s > 0.0)) throw Error(ErrorKind::kInvalidParameter, "rt60 <= 0");
  if (clip_eta && !(*clip_eta > 0.0 && *clip_eta <= 1.0))
    throw Error(ErrorKind::kInvalidParameter, "clip eta outside (0, 1]");
  if (bandwidth_hz && *bandwidth_hz <= 0)
    throw Error(ErrorKind::kInvalidParameter, "bandwidth <= 0");
}

nlohmann::json RecipeToJson(const DegradationRecipe& r) {
  nlohmann::json j;
  j["seed"] = r.seed;
  auto put = [&j](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
    else j[key] = nullptr;
  };
  put("snr_db", r.snr_db);
  put("rt60_s", r.rt60_s);
  put("clip_eta", r.clip_eta);
  put("bandwidth_hz", r.bandwidth_hz);
  put("loss_frames", r.loss_frames);
  if (r.rir_length_s) j["rir_length_s"] = *r.rir_length_s;
  if (r.loss_frame_size) j["loss_frame_size"] = *r.loss_frame_size;
  return j;
}

DegradationRecipe RecipeFromJson(const nlohmann::json& j) {
  DegradationRecipe r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    auto get = [&j](const char* key, auto& opt) {
      using T = typename std::decay_t<decltype(opt)>::value_type;
      if (j.contains(key) && !j[key].is_null()) opt = j[key].get<T>();
    };
    get("snr_db", r.snr_db);
    get("rt60_s", r.rt60_s);
    get("clip_eta", r.clip_eta);
    get("bandwidth_hz", r.bandwidth_hz);
    get("loss_frames", r.loss_frames);
    get("rir_length_s", r.rir_length_s);
    get("loss_frame_size", r.loss_frame_size);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfigError, std::string("bad recipe: ") + e.what());
  }
  return r;
}

std::pair<AudioBuffer, DegradationRecipe> ApplyRecipe(
    const AudioBuffer& x, const DegradationRecipe& r,
    const AudioBuffer& noise_source) {
  r.Validate();
  ValidateAudio(x);
  DegradationRecipe resolved = r;
  AudioBuffer y = x;
  if (r.rt60_s) {
    if (!resolved.rir_length_s) resolved.rir_length_s = 1.2 * *r.rt60_s;
    y = ApplyReverb(y, SynthesizeRir(*r.rt60_s, *resolved.rir_length_s,
                                     x.sample_rate, r.seed));
  }
  if (r.snr_db) y = MixAtSnr(y, noise_source, *r.snr_db);
  if (r.clip_eta) y = Clip(y, *r.clip_eta);
  if (r.bandwidth_hz) y = Bandlimit(y, *r.bandwidth_hz);
  if (r.has_packet_loss()) {
    if (!resolved.loss_frame_size)
      resolved.loss_frame_size = static_cast<std::size_t>(x.sample_rate / 50);
    y = plc::InjectLoss(y, {*resolved.loss_frame_size, *r.loss_frames});
  }
  return {std::move(y), std::move(resolved)};
}

SamplerConfig SamplerConfig::FromJson(const nlohmann::json& j) {
  SamplerConfig c;
  c.p_noise = j.value("p_noise", c.p_noise);
  c.snr_min_db = j.value("snr_min_db", c.snr_min_db);
  c.snr_max_db = j.value("snr_max_db", c.snr_max_db);
  c.p_reverb = j.value("p_reverb", c.p_reverb);
  c.rt60_min_s = j.value("rt60_min_s", c.rt60_min_s);
  c.rt60_max_s = j.value("rt60_max_s", c.rt60_max_s);
  c.p_clip = j.value("p_clip", c.p_clip);
  c.clip_min = j.value("clip_min", c.clip_min);
  c.clip_max = j.value("clip_max", c.clip_max);
  c.p_bandlimit = j.value("p_bandlimit", c.p_bandlimit);
  c.bandwidths_hz = j.value("bandwidths_hz", c.bandwidths_hz);
  c.p_loss = j.value("p_loss", c.p_loss);
  c.loss_rate = j.value("loss_rate", c.loss_rate);
  return c;
}

DegradationRecipe SampleRecipe(const SamplerConfig& cfg, std::uint64_t seed,
                               std::size_t n, int rate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  DegradationRecipe r;
  r.seed = seed;
  if (u(rng) < cfg.p_reverb) r.rt60_s = range(cfg.rt60_min_s, cfg.rt60_max_s);
  if (u(rng) < cfg.p_noise) r.snr_db = range(cfg.snr_min_db, cfg.snr_max_db);
  if (u(rng) < cfg.p_clip) r.clip_eta = range(cfg.clip_min, cfg.clip_max);
  if (u(rng) < cfg.p_bandlimit) {
    std::vector<int> ok;
    for (int b : cfg.bandwidths_hz)
      if (2 * b < rate) ok.push_back(b);
    if (!ok.empty()) r.bandwidth_hz = ok[static_cast<std::size_t>(u(rng) * ok.size()) % ok.size()];
  }
  if (u(rng) < cfg.p_loss) {
    const std::size_t frames = plc::NumFrames(n, static_cast<std::size_t>(rate / 50));
    std::vector<std::size_t> lost;
    for (std::size_t f = 0; f < frames; ++f)
      if (u(rng) < cfg.loss_rate) lost.push_back(f);
    if (!lost.empty()) r.loss_frames = lost;
  }
  if (!r.snr_db && !r.rt60_s && !r.clip_eta && !r.bandwidth_hz && !r.has_packet_loss())
    r.snr_db = range(cfg.snr_min_db, cfg.snr_max_db);
  return r;
}

}  // namespace fse::degrade
