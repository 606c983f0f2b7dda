// src/pipeline/data.cc

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

#include "fse/pipeline/data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "fse/dsp/resample.h"
#include "fse/dsp/wav.h"
#include "fse/error.h"
#include "fse/nn/checkpoint.h"

namespace fse::pipeline {

AudioBuffer SyntheticSpeech(std::size_t n, int rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const double f0_start = 100.0 + 120.0 * u(rng);
  const double f0_end = f0_start * (0.8 + 0.4 * u(rng));
  const double f1a = 300.0 + 500.0 * u(rng), f1b = 300.0 + 500.0 * u(rng);
  const double f2a = 900.0 + 1500.0 * u(rng), f2b = 900.0 + 1500.0 * u(rng);
  const double syl_rate = 3.0 + 2.0 * u(rng), syl_phase = 2.0 * std::numbers::pi * u(rng);
  const double nyquist = 0.5 * rate;
  const double dur = static_cast<double>(n) / rate;

  auto resonance = [](double f, double fc, double bw) {
    const double d = (f - fc) / bw;
    return 1.0 / (1.0 + d * d);
  };
  std::vector<double> x(n, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double a = dur > 0.0 ? t / dur : 0.0;
    const double f0 = f0_start + (f0_end - f0_start) * a;
    const double f1 = f1a + (f1b - f1a) * a, f2 = f2a + (f2b - f2a) * a;
    phase += 2.0 * std::numbers::pi * f0 / rate;
    double v = 0.0;
    for (int h = 1; h * f0 < nyquist * 0.9; ++h) {
      const double fh = h * f0;
      const double amp = (0.15 + resonance(fh, f1, 90.0) + 0.7 * resonance(fh, f2, 140.0)) /
                         std::pow(static_cast<double>(h), 0.8);
      v += amp * std::sin(h * phase);
    }
    const double s = std::sin(2.0 * std::numbers::pi * syl_rate * t + syl_phase);
    x[i] = (0.35 + 0.65 * s * s) * v + 0.01 * g(rng);
  }
  double p = 0.0;
  for (double v : x) p += v * v;
  const double rms = std::sqrt(p / std::max<std::size_t>(n, 1));
  if (rms > 0.0)
    for (auto& v : x) v *= 0.08 / rms;
  return AudioBuffer(std::move(x), rate);
}

namespace {

std::size_t SegmentLength48(const DataConfig& cfg) {
  const auto n = static_cast<std::size_t>(std::llround(cfg.segment_s * 16000.0));
  return 3 * std::max<std::size_t>(n, 320);
}

AudioBuffer FitLength(AudioBuffer x, std::size_t n) {
  x.samples.resize(n, 0.0);
  return x;
}

std::vector<std::filesystem::path> WavFiles(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir))
    throw Error(ErrorKind::kIo, "not a directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::vector<CleanUtterance> LoadCleanCorpus(const DataConfig& cfg) {
  const std::size_t n48 = SegmentLength48(cfg);
  std::vector<CleanUtterance> out;
  if (cfg.clean_manifest.empty()) {
    for (std::size_t i = 0; i < cfg.n_utterances; ++i)
      out.push_back({"synth" + std::to_string(i), SyntheticSpeech(n48, 48000, cfg.seed * 1000 + i)});
    return out;
  }
  const std::filesystem::path manifest(cfg.clean_manifest);
  for (const auto& e : curation::ReadManifest(manifest)) {
    if (e.verdict == curation::Verdict::kDrop) continue;
    if (out.size() == cfg.n_utterances) break;
    std::filesystem::path p(e.path);
    if (p.is_relative()) p = manifest.parent_path() / p;
    AudioBuffer x = ReadWav(p);
    if (x.sample_rate != 48000) x = Resample(x, 48000);
    out.push_back({e.utterance_id, FitLength(std::move(x), n48)});
  }
  if (out.empty()) throw Error(ErrorKind::kNoData, "manifest keeps no utterances");
  return out;
}

AudioBuffer NoiseFor(const DataConfig& cfg, std::size_t index, std::size_t n, int rate) {
  if (!cfg.noise_dir.empty()) {
    const auto files = WavFiles(cfg.noise_dir);
    if (!files.empty()) {
      AudioBuffer x = ReadWav(files[index % files.size()]);
      if (x.sample_rate != rate) x = Resample(x, rate);
      if (!x.empty()) {
        std::vector<double> tiled(n);
        for (std::size_t i = 0; i < n; ++i) tiled[i] = x.samples[i % x.size()];
        return AudioBuffer(std::move(tiled), rate);
      }
    }
  }
  std::mt19937_64 rng(cfg.seed * 7919 + index);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> v(n);
  for (auto& s : v) s = g(rng);
  return AudioBuffer(std::move(v), rate);
}

std::vector<SimulatedPair> SimulatePairs(const DataConfig& cfg) {
  const auto corpus = LoadCleanCorpus(cfg);
  const auto sampler = degrade::SamplerConfig::FromJson(cfg.sampler);
  std::vector<SimulatedPair> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    SimulatedPair p;
    p.id = corpus[i].id;
    p.clean48 = corpus[i].clean48;
    p.clean16 = Resample(p.clean48, 16000);
    const std::size_t n = p.clean16.size();
    const auto recipe = degrade::SampleRecipe(sampler, cfg.seed + i, n, 16000);
    auto [y, resolved] = degrade::ApplyRecipe(p.clean16, recipe, NoiseFor(cfg, i, n, 16000));
    p.degraded16 = std::move(y);
    p.recipe = std::move(resolved);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SimulatedPair> Simulate(const DataConfig& cfg, const std::filesystem::path& dir) {
  auto pairs = SimulatePairs(cfg);
  std::filesystem::create_directories(dir);
  for (const auto& p : pairs) {
    WriteWav(dir / (p.id + "_clean.wav"), p.clean16, WavFormat::kFloat32);
    WriteWav(dir / (p.id + "_degraded.wav"), p.degraded16, WavFormat::kFloat32);
    std::ofstream f(dir / (p.id + ".json"));
    if (!f) throw Error(ErrorKind::kIo, "cannot write sidecar for " + p.id);
    f << degrade::RecipeToJson(p.recipe).dump(2) << '\n';
  }
  return pairs;
}

std::string DataHash(const std::vector<SimulatedPair>& pairs) {
  std::string bytes;
  auto append = [&](const AudioBuffer& x) {
    bytes.append(reinterpret_cast<const char*>(&x.sample_rate), sizeof(x.sample_rate));
    bytes.append(reinterpret_cast<const char*>(x.samples.data()),
                 x.samples.size() * sizeof(double));
  };
  for (const auto& p : pairs) {
    bytes += p.id;
    append(p.clean48);
    append(p.degraded16);
  }
  return nn::HexDigest(nn::Fnv1a64(bytes));
}

}  // namespace fse::pipeline
