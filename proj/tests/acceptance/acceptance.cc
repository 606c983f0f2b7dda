// tests/acceptance/acceptance.cc

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

// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (default: all 13)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fse/curation/curation.h"
#include "fse/degrade/degrade.h"
#include "fse/dsp/stft.h"
#include "fse/encoder/encoder.h"
#include "fse/error.h"
#include "fse/gen/gan.h"
#include "fse/gen/models.h"
#include "fse/gen/train.h"
#include "fse/nn/checkpoint.h"
#include "fse/pipeline/config.h"
#include "fse/pipeline/pipeline.h"
#include "fse/pipeline/size.h"
#include "fse/plc/plc.h"
#include "fse/postnet/postnet.h"
#include "fse/predictor/predictor.h"
#include "grad_check.h"
#include "test_util.h"

namespace fse::acceptance {
namespace {

using nn::Tensor;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Appends a labelled observation and folds it into the verdict.
void Note(Outcome& o, bool ok, const std::string& what) {
  o.pass = o.pass && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [FAIL]");
}

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

AudioBuffer Speech(std::size_t n, std::uint64_t seed, int rate = 16000) {
  return AudioBuffer(testing::SpeechLike(n, rate, seed), rate);
}

Tensor DyadicMatrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-4096, 4096);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = u(rng) / 1024.0;
  return Tensor::FromData({rows, cols}, v);
}

Tensor RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  return Tensor::FromData({rows, cols}, testing::RandomSignal(rows * cols, seed));
}

// 1. STFT round trip.
Outcome StftRoundTrip() {
  Outcome o;
  const auto t0 = Clock::now();
  const StftConfig cfg = StftConfig::Canonical();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> len(16000, 48000);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t n = len(rng);
    const AudioBuffer x(testing::RandomSignal(n, 1000 + s), 16000);
    const AudioBuffer y = Istft(Stft(x, cfg), n);
    worst = std::max(worst, y.size() == n ? testing::MaxAbsDiff(x.samples, y.samples) : 1e9);
  }
  const double sec = Seconds(t0);
  Note(o, cfg.fft_size == 1280 && cfg.hop_size == 320, "config 1280/320");
  Note(o, worst < 1e-6, "max err " + Fmt("%.2e", worst) + " < 1e-6 over 100 signals");
  Note(o, sec < 10.0, Fmt("%.2f s", sec) + " < 10 s");
  return o;
}

// 2. SNR fidelity; measured against the exact speech component.
Outcome SnrFidelity() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double snr : {-5.0, 0.0, 5.0, 20.0}) {
    for (std::uint64_t t = 0; t < 50; ++t) {
      const AudioBuffer s = Speech(16000, 200 + t);
      const AudioBuffer n(testing::RandomSignal(7000 + 37 * t, 300 + t, 0.3), 16000);
      const AudioBuffer mix = degrade::MixAtSnr(s, n, snr);
      double ps = 0.0, pn = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = mix.samples[i] - s.samples[i];
        ps += s.samples[i] * s.samples[i];
        pn += r * r;
      }
      worst = std::max(worst, std::abs(10.0 * std::log10(ps / pn) - snr));
    }
  }
  const double sec = Seconds(t0);
  Note(o, worst <= 0.01, "max |measured - requested| " + Fmt("%.2e", worst) + " dB <= 0.01");
  Note(o, sec < 10.0, Fmt("%.2f s", sec) + " < 10 s");
  return o;
}

// Schroeder integration with a -5..-35 dB least-squares fit.
double SchroederRt60(const std::vector<double>& h, int rate) {
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) edc[i] = (acc += h[i] * h[i]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double db = 10.0 * std::log10(edc[i] / edc[0]);
    if (db > -5.0 || db < -35.0) continue;
    const double t = static_cast<double>(i) / rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -60.0 / slope;
}

// 3. RIR RT60.
Outcome RirRt60() {
  Outcome o;
  const auto t0 = Clock::now();
  for (double rt : {0.6, 1.0, 1.6}) {
    double worst = 0.0, worst_lib = 0.0;
    for (std::uint64_t s = 0; s < 30; ++s) {
      const auto rir = degrade::SynthesizeRir(rt, 1.5 * rt, 16000, 400 + s);
      worst = std::max(worst, std::abs(SchroederRt60(rir.taps, rir.sample_rate) / rt - 1.0));
      worst_lib = std::max(worst_lib, std::abs(degrade::EstimateRt60(rir) / rt - 1.0));
    }
    Note(o, worst <= 0.2 && worst_lib <= 0.2,
         "rt60 " + Fmt("%.1f", rt) + ": max rel dev " + Fmt("%.3f", worst) + " (library " +
             Fmt("%.3f", worst_lib) + ") <= 0.2");
  }
  const double sec = Seconds(t0);
  Note(o, sec < 30.0, Fmt("%.2f s", sec) + " < 30 s");
  return o;
}

// 4. PLC exactness.
Outcome PlcExactness() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t tp = 0, fp = 0, fn = 0;
  double min_rms = 1e9;
  for (std::uint64_t s = 0; s < 200; ++s) {
    std::mt19937_64 rng(500 + s);
    const std::size_t n = 8000 + rng() % 24000;
    AudioBuffer x = Speech(n, 600 + s);
    const double gain = 1.0 + (rng() % 400) / 100.0;
    for (double& v : x.samples) v *= gain;
    min_rms = std::min(min_rms, std::sqrt(MeanPower(x.samples)));
    plc::LossMask m;
    const std::size_t frames = plc::NumFrames(n, m.frame_size);
    const unsigned rate = 2 + rng() % 8;
    for (std::size_t f = 0; f < frames; ++f)
      if (rng() % rate == 0) m.lost_frames.push_back(f);
    const auto d = plc::DetectLoss(plc::InjectLoss(x, m));
    const std::set<std::size_t> truth(m.lost_frames.begin(), m.lost_frames.end());
    const std::set<std::size_t> got(d.lost_frames.begin(), d.lost_frames.end());
    for (auto f : got) (truth.count(f) ? tp : fp)++;
    for (auto f : truth) fn += got.count(f) ? 0 : 1;
  }
  const double precision = tp + fp ? static_cast<double>(tp) / (tp + fp) : 1.0;
  const double recall = tp + fn ? static_cast<double>(tp) / (tp + fn) : 1.0;
  const double sec = Seconds(t0);
  Note(o, min_rms >= 0.05, "min rms " + Fmt("%.3f", min_rms) + " >= 0.05");
  Note(o, precision == 1.0 && recall == 1.0,
       "precision " + Fmt("%.4f", precision) + " recall " + Fmt("%.4f", recall) + " over " +
           std::to_string(tp + fn) + " lost frames");
  Note(o, sec < 10.0, Fmt("%.2f s", sec) + " < 10 s");
  return o;
}

// 5. Substitution independence.
Outcome SubstitutionIndependence() {
  Outcome o;
  const auto t0 = Clock::now();
  bool unchanged = true, sensitive = true;
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto cfg = encoder::EncoderConfig::Toy();
    cfg.seed = 700 + t;
    const encoder::Encoder enc(cfg);
    std::mt19937_64 rng(800 + t);
    const std::size_t n = 8000;
    const AudioBuffer x = Speech(n, 900 + t);
    const std::size_t frames = enc.NumFrames(n);
    std::vector<bool> flags(frames, false);
    for (std::size_t f = 0; f < frames; ++f) flags[f] = rng() % 4 == 0;
    flags[rng() % frames] = true;
    std::size_t clear = 0;
    while (flags[clear]) ++clear;

    AudioBuffer y = x;
    std::normal_distribution<double> big(0.0, 5.0);
    for (std::size_t i = 0; i < n; ++i)
      if (flags[i / cfg.frame_hop]) y.samples[i] = big(rng);
    AudioBuffer z = x;
    z.samples[clear * cfg.frame_hop] += 0.5;

    const auto a = enc.Encode(x, flags), b = enc.Encode(y, flags), c = enc.Encode(z, flags);
    unchanged = unchanged && a.r_a0.values() == b.r_a0.values() &&
                a.r_p.values() == b.r_p.values();
    sensitive = sensitive && a.r_p.values() != c.r_p.values();
  }
  const double sec = Seconds(t0);
  Note(o, unchanged, "taps bit-identical under flagged-sample perturbation, 20 trials");
  Note(o, sensitive, "unflagged perturbation changes the output");
  Note(o, sec < 30.0, Fmt("%.2f s", sec) + " < 30 s");
  return o;
}

// 6. Conditioning identity. Dyadic inputs keep the shifted sums exact.
Outcome ConditioningIdentity() {
  Outcome o;
  bool zero_ok = true, shift_ok = true;
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto cfg = gen::BackboneConfig::ToyAdapter();
    cfg.seed = 1000 + t;
    const gen::Adapter a(cfg);
    std::mt19937_64 rng(1100 + t);
    const std::size_t f = 10 + t;
    const Tensor r_p = DyadicMatrix(f, cfg.input_dim, rng);
    const Tensor r_a0 = DyadicMatrix(f, cfg.input_dim, rng);
    const Tensor delta = DyadicMatrix(f, cfg.input_dim, rng);
    zero_ok = zero_ok &&
              a.Adapt(r_p, Tensor::Zeros({f, cfg.input_dim})).values() == a.Forward(r_p).values();
    shift_ok = shift_ok && a.Adapt(nn::Add(r_p, delta), nn::Sub(r_a0, delta)).values() ==
                               a.Adapt(r_p, r_a0).values();
  }
  Note(o, zero_ok, "adapt(R_P, 0) == backbone(R_P)");
  Note(o, shift_ok, "adapt(R_P + d, R_A0 - d) == adapt(R_P, R_A0)");
  Note(o, true, "20 trials each");
  return o;
}

// 7. Gradient checks.
Outcome GradientChecks() {
  Outcome o;
  constexpr double kTol = 1e-4;
  constexpr std::size_t kCoords = 32;
  auto report = [&](const std::string& name, const testing::GradCheckResult& r) {
    Note(o, r.checked >= kCoords && r.max_rel_error < kTol,
         name + " " + Fmt("%.1e", r.max_rel_error) + " (" + std::to_string(r.checked) + ")");
  };
  gen::DiscriminatorSuiteConfig suite_cfg;
  suite_cfg.repr_disc_dims = 32;
  suite_cfg.channels = 4;

  {
    encoder::EncoderConfig c;
    c.conv_channels = 16;
    c.n_transformer_layers = 2;
    c.d_model = 32;
    c.n_heads = 4;
    c.ffn_dim = 64;
    const encoder::Encoder enc(c);
    encoder::EncoderTaps target;
    {
      nn::NoGradGuard ng;
      target = enc.Forward(Tensor::FromData({1600}, testing::RandomSignal(1600, 6)));
    }
    const Tensor wav = Tensor::FromData({1600}, testing::SpeechLike(1600, 16000, 5));
    report("distill_loss", testing::GradCheck(enc.Parameters(), [&] {
             return encoder::DistillLoss(enc.Forward(wav), target);
           }, kCoords, 7));
  }
  gen::BackboneConfig small;
  small.input_dim = 32;
  small.hidden_dim = 24;
  small.n_blocks = 2;
  small.intermediate_dim = 48;
  {
    const gen::Adapter a(small);
    const gen::DiscriminatorSuite suite(suite_cfg);
    const Tensor fused = RandomMatrix(6, 32, 3), target = RandomMatrix(6, 32, 4);
    report("adapter_loss mse", testing::GradCheck(a.Parameters(), [&] {
             return gen::AdapterLoss(a.Forward(fused), target, suite, {1.0, 0.0, 0.0}).total;
           }, kCoords, 5));
  }
  {
    auto vc = small;
    vc.has_istft_head = true;
    vc.istft_cfg = StftConfig::Canonical();
    const gen::Vocoder v(vc);
    const gen::MultiScaleMelLoss mel(16000);
    const Tensor r = RandomMatrix(8, 32, 5);
    const Tensor y = Tensor::FromData({2560}, testing::SpeechLike(2560, 16000, 5));
    report("vocoder mel", testing::GradCheck(v.Parameters(), [&] { return mel(v.Forward(r), y); },
                                             kCoords, 9));
  }
  {
    Tensor y_hat = Tensor::Parameter({2000}, testing::SpeechLike(2000, 16000, 3));
    const Tensor y = Tensor::FromData({2000}, testing::SpeechLike(2000, 16000, 5));
    report("stft_domain_loss", testing::GradCheck({y_hat}, [&] {
             return predictor::StftDomainLoss(y_hat, y).total;
           }, kCoords, 7));
  }
  {
    postnet::PostNetConfig pc;
    pc.core.n_blocks = 1;
    pc.core.lstm_hidden = 4;
    pc.core.emb_dim = 4;
    pc.core.attn_heads = 2;
    const postnet::PostNet net(pc);
    gen::DiscriminatorSuite suite(suite_cfg);
    suite.SetRequiresGrad(false);
    const gen::MultiScaleMelLoss mel(48000);
    auto wave = [](std::uint64_t seed) {
      return Tensor::FromData({4830}, testing::SpeechLike(4830, 48000, seed));
    };
    const Tensor g = wave(1), p = wave(2), y = wave(3);
    report("postnet base loss", testing::GradCheck(net.Parameters(), [&] {
             return postnet::PostnetLoss(net.Forward(g, p), y, suite, mel, {}).total;
           }, kCoords, 4));
  }
  return o;
}

// Toy pipeline with a short data budget.
pipeline::RunConfig ToyRun(long steps) {
  auto c = pipeline::RunConfig::Toy();
  c.data.n_utterances = 1;
  c.data.segment_s = 0.3;
  for (auto s : pipeline::kAllStages) c.train.For(s).steps = steps;
  return c;
}

// 8. Length contracts.
Outcome LengthContracts() {
  Outcome o;
  {
    const gen::Vocoder v(gen::BackboneConfig::ToyVocoder());
    bool ok = v.istft_config().hop_size == 320;
    for (std::size_t f : {1, 7, 50}) {
      const auto y = v.Vocode(RandomMatrix(f, v.config().input_dim, 20 + f));
      ok = ok && y.size() == 320 * f;
    }
    Note(o, ok, "vocode emits 320 samples/frame (F = 1, 7, 50)");
  }
  {
    const postnet::PostNet net(postnet::PostNetConfig::Toy());
    bool ok = true;
    for (std::size_t n : {800, 4001, 16000}) {
      const auto y = net.FuseAndExtend(Speech(n, n), Speech(n, n + 1));
      ok = ok && y.size() == 3 * n && y.sample_rate == 48000;
    }
    Note(o, ok, "fuse_and_extend emits 3x samples (N = 800, 4001, 16000)");
  }
  {
    const pipeline::PipelineCheckpointSet set(pipeline::InitialCheckpoints(ToyRun(1)));
    const pipeline::Enhancer enh(set);
    long worst = 0;
    for (int rate : pipeline::kSupportedRates) {
      const std::size_t n = static_cast<std::size_t>(rate) / 2 + 7;
      const auto y = enh.Enhance(Speech(n, rate, rate));
      worst = std::max(worst, std::labs(static_cast<long>(y.size()) - static_cast<long>(n)));
      if (y.sample_rate != rate) worst = 1 << 20;
    }
    Note(o, worst <= 1,
         "enhance length drift " + std::to_string(worst) + " <= 1 sample at all 7 rates");
  }
  return o;
}

// 9. Vocoder checkpoint untouched by the adapter and postnet stages.
Outcome NoJointFineTuning() {
  Outcome o;
  const auto cfg = ToyRun(50);
  auto store = pipeline::InitialCheckpoints(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "fse_acceptance_c9";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "vocoder.ckpt").string();
  store.ckpts.at(pipeline::Stage::kVocoder).Save(path);
  auto file_bytes = [&] {
    std::ifstream f(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  const std::string bytes0 = file_bytes();
  const std::string h0 = store.Get(pipeline::Stage::kVocoder).Hash();

  const auto ad = pipeline::RunStage(pipeline::Stage::kAdapter, cfg, store);
  store.ckpts[pipeline::Stage::kAdapter] = ad.checkpoint;
  const std::string h1 = store.Get(pipeline::Stage::kVocoder).Hash();
  const auto post = pipeline::RunStage(pipeline::Stage::kPostnet, cfg, store);
  const std::string h2 = store.Get(pipeline::Stage::kVocoder).Hash();
  const std::string h_disk = nn::Checkpoint::Load(path).Hash();
  const bool bytes_same = file_bytes() == bytes0;
  std::filesystem::remove_all(dir);

  Note(o, ad.steps_run == 50 && post.steps_run == 50,
       "adapter " + std::to_string(ad.steps_run) + " and postnet " +
           std::to_string(post.steps_run) + " steps");
  Note(o, h0 == h1 && h1 == h2 && h_disk == h0 && bytes_same,
       "vocoder hash " + h0 + " before, " + h1 + " after adapter, " + h2 + " after postnet");
  Note(o, post.checkpoint.provenance.value("vocoder", "") == h0,
       "postnet provenance names the same vocoder");
  return o;
}

// 10. Overfit smoke tests.
Outcome OverfitSmoke() {
  Outcome o;
  const auto t0 = Clock::now();
  const AudioBuffer clean = Speech(4800, 7);
  {
    AudioBuffer degraded = plc::InjectLoss(clean, {320, {2, 3}});
    for (std::size_t i = 0; i < degraded.size(); ++i)
      degraded.samples[i] += 0.05 * std::sin(0.3 * static_cast<double>(i));
    const nn::TrainOptions opt{.steps = 200, .lr = 2e-3, .stop_ratio = 0.5};
    const auto r = encoder::TrainEncoder({{clean, degraded, {}}}, encoder::EncoderConfig::Toy(), opt);
    Note(o, r.final_loss < 0.5 * r.initial_loss && r.steps_run <= 200,
         "encoder distill " + Fmt("%.4g", r.initial_loss) + " -> " + Fmt("%.4g", r.final_loss) +
             " in " + std::to_string(r.steps_run) + " (< 0.5x)");
  }
  {
    AudioBuffer noisy = clean;
    const auto noise = testing::RandomSignal(clean.size(), 13, 0.05);
    for (std::size_t i = 0; i < noisy.size(); ++i) noisy.samples[i] += noise[i];
    degrade::DegradationRecipe recipe;
    recipe.snr_db = 5.0;
    const nn::TrainOptions opt{.steps = 200, .lr = 1e-2, .stop_ratio = 0.3};
    const auto r =
        predictor::TrainPredictor({{clean, noisy, recipe}}, predictor::PredictorConfig::Toy(), opt);
    Note(o, r.final_loss < 0.3 * r.initial_loss && r.steps_run <= 200,
         "predictor " + Fmt("%.4g", r.initial_loss) + " -> " + Fmt("%.4g", r.final_loss) +
             " in " + std::to_string(r.steps_run) + " (< 0.3x)");
  }
  {
    const auto enc_cfg = encoder::EncoderConfig::Toy();
    const encoder::Encoder enc(enc_cfg);
    const auto enc_ckpt = nn::Checkpoint::FromModule("encoder", enc_cfg, enc);
    const nn::TrainOptions opt{.steps = 200, .lr = 2e-3, .stop_ratio = 0.5};
    const auto r = gen::TrainVocoder({clean}, &enc_ckpt, gen::GenTrainConfig::ToyVocoder(), opt);
    Note(o, r.final_loss < 0.5 * r.initial_loss && r.steps_run <= 200,
         "vocoder mel " + Fmt("%.4g", r.initial_loss) + " -> " + Fmt("%.4g", r.final_loss) +
             " in " + std::to_string(r.steps_run) + " (< 0.5x)");
  }
  const double sec = Seconds(t0);
  Note(o, sec < 600.0, Fmt("%.1f s", sec) + " < 600 s");
  return o;
}

// 11. Curation gate.
Outcome CurationGate() {
  Outcome o;
  using curation::ManifestEntry;
  using curation::Verdict;
  auto entry = [](const std::string& id, double score) {
    ManifestEntry e;
    e.utterance_id = id;
    e.path = id + ".wav";
    e.sample_rate = 16000;
    e.duration_s = 2.0;
    e.corpus = "synthetic";
    for (const char* k : {"ovrl", "sig", "bak", "p808"}) e.scores[k] = 4.0;
    e.scores["ovrl"] = score;
    return e;
  };
  const std::vector<std::string> req = {"ovrl", "sig", "bak", "p808"};
  const auto b = curation::ApplyFilter({entry("at", 3.0), entry("below", 2.99)}, req, 3.0);
  Note(o, b[0].verdict == Verdict::kKeep && b[1].verdict == Verdict::kDrop,
       "3.0 keeps, 2.99 drops at threshold 3");

  std::mt19937_64 rng(1300);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  std::vector<ManifestEntry> manifest;
  for (int i = 0; i < 1000; ++i) {
    auto e = entry("u" + std::to_string(i), std::round(u(rng) * 100.0) / 100.0);
    e.scores["bak"] = std::round(u(rng) * 100.0) / 100.0;
    manifest.push_back(e);
  }
  auto kept = [&](double thr) {
    std::set<std::string> ids;
    for (const auto& e : curation::ApplyFilter(manifest, req, thr))
      if (e.verdict == Verdict::kKeep) ids.insert(e.utterance_id);
    return ids;
  };
  bool monotone = true;
  std::set<std::string> prev = kept(0.0);
  const std::size_t all = prev.size();
  for (double thr = 0.25; thr <= 5.5; thr += 0.25) {
    const auto cur = kept(thr);
    monotone = monotone && std::includes(prev.begin(), prev.end(), cur.begin(), cur.end());
    prev = cur;
  }
  Note(o, monotone && all == 1000 && prev.empty(),
       "kept set shrinks monotonically over 22 thresholds on 1000 entries");
  return o;
}

// 12. Full-size construct check.
Outcome FullSizeConstruct() {
  Outcome o;
  nn::NoGradGuard ng;
  const auto cfg = pipeline::RunConfig::FullSize();
  Note(o, cfg.adapter.model.hidden_dim == 1024 && cfg.vocoder.model.n_blocks == 12 &&
              cfg.vocoder.model.intermediate_dim == 3072 &&
              cfg.vocoder.model.istft_cfg == StftConfig{1280, 320},
       "hidden 1024, 12 blocks, intermediate 3072, fft 1280/320");
  const AudioBuffer x = Speech(16000, 1400);
  auto timed = [&](const std::string& name, const std::function<bool()>& fn) {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "  %s: %s\n", name.c_str(), e.what());
    }
    Note(o, ok, name + " forward " + Fmt("%.1f s", Seconds(t0)));
  };
  const std::size_t frames = 50;
  timed("encoder", [&] {
    const encoder::Encoder enc(cfg.encoder);
    const auto b = enc.Encode(x);
    return b.frames() == frames && b.r_p.dim(1) == 1024 && AllFinite(b.r_p.ToVector());
  });
  timed("adapter", [&] {
    const gen::Adapter a(cfg.adapter.model);
    const auto r = a.Adapt(RandomMatrix(frames, 1024, 1), RandomMatrix(frames, 1024, 2));
    return r.dim(0) == frames && r.dim(1) == 1024 && AllFinite(r.ToVector());
  });
  timed("vocoder", [&] {
    const gen::Vocoder v(cfg.vocoder.model);
    const auto y = v.Vocode(RandomMatrix(frames, 1024, 3));
    return y.size() == 16000 && AllFinite(y.samples);
  });
  AudioBuffer pred;
  timed("predictor", [&] {
    const predictor::Predictor p(cfg.predictor);
    pred = p.Predict(x);
    return pred.size() == 16000 && AllFinite(pred.samples);
  });
  timed("postnet", [&] {
    const postnet::PostNet net(cfg.postnet.model);
    const auto y = net.FuseAndExtend(x, pred.empty() ? x : pred);
    return y.size() == 48000 && AllFinite(y.samples);
  });
  const auto report = pipeline::CountParamsAndMacs(cfg);
  const std::string table = report.Render(true);
  Note(o, table.find("567.76") != std::string::npos,
       "size table: " + Fmt("%.2f", report.total_params() / 1e6) + " M params vs 567.76 M reference");
  std::printf("%s", table.c_str());
  return o;
}

// 13. Determinism of enhance and every train stage.
Outcome Determinism() {
  Outcome o;
  auto cfg = ToyRun(3);
  cfg.data.segment_s = 0.2;
  std::string mismatched;
  auto train_all = [&] {
    pipeline::CheckpointStore store;
    std::vector<std::string> hashes;
    for (auto s : pipeline::kAllStages) {
      const auto r = pipeline::RunStage(s, cfg, store);
      store.ckpts[s] = r.checkpoint;
      std::string log;
      for (const auto& l : r.log.lines()) log += l + "\n";
      hashes.push_back(r.checkpoint.Hash() + "/" + nn::HexDigest(nn::Fnv1a64(log)));
    }
    return std::make_pair(store, hashes);
  };
  const auto [store_a, ha] = train_all();
  const auto [store_b, hb] = train_all();
  for (std::size_t i = 0; i < ha.size(); ++i)
    if (ha[i] != hb[i]) mismatched += " " + pipeline::StageName(pipeline::kAllStages[i]);
  Note(o, mismatched.empty(), "5 stages retrained: checkpoints and logs identical" +
                                  (mismatched.empty() ? "" : " except" + mismatched));

  const AudioBuffer x = Speech(12000, 1500);
  const auto y1 = pipeline::Enhancer(pipeline::PipelineCheckpointSet(store_a)).Enhance(x);
  const auto y2 = pipeline::Enhancer(pipeline::PipelineCheckpointSet(store_b)).Enhance(x);
  const auto y3 = pipeline::Enhancer(pipeline::PipelineCheckpointSet(store_a))
                      .Enhance(x, {.parallel = true, .probe = {}});
  Note(o, y1.samples == y2.samples && y1.samples == y3.samples,
       "enhance bit-identical across runs and branch threading");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "STFT round trip", StftRoundTrip},
    {2, "SNR fidelity", SnrFidelity},
    {3, "RIR RT60", RirRt60},
    {4, "PLC exactness", PlcExactness},
    {5, "substitution independence", SubstitutionIndependence},
    {6, "conditioning identity", ConditioningIdentity},
    {7, "gradient checks", GradientChecks},
    {8, "length contracts", LengthContracts},
    {9, "no joint fine-tuning", NoJointFineTuning},
    {10, "overfit smoke tests", OverfitSmoke},
    {11, "curation gate", CurationGate},
    {12, "full-size construct", FullSizeConstruct},
    {13, "determinism", Determinism},
};

}  // namespace
}  // namespace fse::acceptance

int main(int argc, char** argv) {
  using namespace fse::acceptance;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0, run = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++run;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                Seconds(t0), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  return failed == 0 ? 0 : 1;
}
