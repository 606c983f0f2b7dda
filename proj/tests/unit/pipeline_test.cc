// tests/unit/pipeline_test.cc

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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "fse/dsp/wav.h"
#include "fse/error.h"
#include "fse/nn/layers.h"
#include "fse/pipeline/config.h"
#include "fse/pipeline/data.h"
#include "fse/pipeline/pipeline.h"
#include "fse/pipeline/size.h"
#include "test_util.h"

namespace fse::pipeline {
namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kIo;
}

RunConfig Tiny() {
  RunConfig c = RunConfig::Toy();
  c.encoder.conv_channels = 16;
  c.encoder.n_transformer_layers = 1;
  c.encoder.d_model = 32;
  c.encoder.n_heads = 4;
  c.encoder.ffn_dim = 64;
  for (auto* g : {&c.adapter, &c.vocoder}) {
    g->model.input_dim = g->model.hidden_dim = 32;
    g->model.n_blocks = 1;
    g->model.intermediate_dim = 64;
    g->disc.repr_disc_dims = 32;
    g->disc.channels = 4;
  }
  c.predictor.n_blocks = 1;
  c.predictor.lstm_hidden = 8;
  c.predictor.emb_dim = 4;
  c.postnet.model.core.n_blocks = 1;
  c.postnet.model.core.lstm_hidden = 4;
  c.postnet.model.core.emb_dim = 4;
  c.postnet.disc.repr_disc_dims = 32;
  c.postnet.disc.channels = 4;
  c.data.n_utterances = 1;
  c.data.segment_s = 0.2;
  for (Stage s : kAllStages) c.train.For(s).steps = 2;
  return c;
}

std::uint64_t Enumerate(const nn::Checkpoint& c) {
  std::uint64_t n = 0;
  for (const auto& [name, t] : c.tensors) n += t.numel();
  return n;
}

TEST_CASE("run config") {
  CHECK_NOTHROW(RunConfig::Toy().Validate());
  CHECK_NOTHROW(Tiny().Validate());
  const auto full = RunConfig::FullSize();
  CHECK_NOTHROW(full.Validate());
  CHECK(full.full_size);
  for (const auto* g : {&full.adapter.model, &full.vocoder.model}) {
    CHECK(g->hidden_dim == 1024);
    CHECK(g->n_blocks == 12);
    CHECK(g->intermediate_dim == 3072);
  }
  CHECK(full.vocoder.model.istft_cfg->fft_size == 1280);
  CHECK(full.vocoder.model.istft_cfg->hop_size == 320);

  const nlohmann::json j = Tiny();
  const auto back = j.get<RunConfig>();
  CHECK(nlohmann::json(back) == j);

  const auto partial = nlohmann::json{{"full_size", true}, {"data", {{"n_utterances", 5}}}}
                           .get<RunConfig>();
  CHECK(partial.adapter.model.hidden_dim == 1024);
  CHECK(partial.data.n_utterances == 5);
  CHECK(partial.data.segment_s == DataConfig{}.segment_s);

  auto bad = Tiny();
  bad.vocoder.model.input_dim = 48;
  CHECK(KindOf([&] { bad.Validate(); }) == ErrorKind::kConfigError);
  bad = Tiny();
  bad.encoder.n_heads = 5;
  CHECK(KindOf([&] { bad.Validate(); }) == ErrorKind::kConfigError);

  ::setenv("FSE_OUTPUT_ROOT", "/tmp/fse_out", 1);
  ::setenv("FSE_CACHE_ROOT", "/tmp/fse_cache", 1);
  auto env = Tiny();
  ApplyEnvironment(env);
  CHECK(env.output_root == "/tmp/fse_out");
  CHECK(env.cache_root == "/tmp/fse_cache");
  ::unsetenv("FSE_OUTPUT_ROOT");
  ::unsetenv("FSE_CACHE_ROOT");

  for (Stage s : kAllStages) CHECK(StageFromName(StageName(s)) == s);
  CHECK(KindOf([] { StageFromName("teacher"); }) == ErrorKind::kInvalidParameter);
}

TEST_CASE("checkpoint set compatibility") {
  const auto store = InitialCheckpoints(Tiny());
  CHECK_NOTHROW(PipelineCheckpointSet{store});
  auto missing = store;
  missing.ckpts.erase(Stage::kPostnet);
  CHECK(KindOf([&] { PipelineCheckpointSet{missing}; }) == ErrorKind::kMissingDependency);

  auto wide = Tiny();
  for (auto* g : {&wide.adapter, &wide.vocoder}) g->model.input_dim = 48;
  wide.adapter.disc.repr_disc_dims = 48;
  wide.encoder.d_model = 48;
  auto mixed = store;
  mixed.ckpts.at(Stage::kAdapter) = InitialCheckpoints(wide).ckpts.at(Stage::kAdapter);
  CHECK(KindOf([&] { PipelineCheckpointSet{mixed}; }) == ErrorKind::kConfigMismatch);

  auto swapped = store;
  std::swap(swapped.ckpts.at(Stage::kAdapter), swapped.ckpts.at(Stage::kVocoder));
  CHECK(KindOf([&] { PipelineCheckpointSet{swapped}; }) == ErrorKind::kConfigMismatch);

  const auto dir = std::filesystem::temp_directory_path() / "fse_pipeline_ckpts";
  store.Save(dir);
  const auto loaded = CheckpointStore::Load(dir);
  for (Stage s : kAllStages) CHECK(loaded.Get(s).Hash() == store.Get(s).Hash());
  std::filesystem::remove_all(dir);
}

TEST_CASE("enhance length, rates and probes") {
  const PipelineCheckpointSet set(InitialCheckpoints(Tiny()));
  const Enhancer enh(set);
  for (int rate : kSupportedRates) {
    const std::size_t n = static_cast<std::size_t>(rate) / 4 + 1;
    const AudioBuffer x(testing::SpeechLike(n, rate, rate), rate);
    std::map<std::string, AudioBuffer> seen;
    const auto y = enh.Enhance(x, {.probe = [&](const std::string& p, const AudioBuffer& b) {
                                     seen[p] = b;
                                   }});
    CAPTURE(rate);
    CHECK(y.sample_rate == rate);
    CHECK(std::abs(static_cast<long>(y.size()) - static_cast<long>(n)) <= 1);
    REQUIRE(seen.size() == 5);
    const std::size_t n16 = seen.at("input16k").size();
    CHECK(seen.at("input16k").sample_rate == 16000);
    CHECK(std::abs(static_cast<double>(n16) - n * 16000.0 / rate) <= 1.0);
    for (const char* b : {"generative", "predictive"}) {
      CHECK(seen.at(b).sample_rate == 16000);
      CHECK(seen.at(b).size() == n16);
    }
    CHECK(seen.at("fused48k").sample_rate == 48000);
    CHECK(seen.at("fused48k").size() == 3 * n16);
    for (double v : y.samples) REQUIRE(std::isfinite(v));
  }
  const AudioBuffer x(testing::SpeechLike(16000, 16000, 1), 16000);
  const auto a = enh.Enhance(x);
  CHECK(a.size() == 16000);
  CHECK(enh.Enhance(x).samples == a.samples);
  CHECK(enh.Enhance(x, {.parallel = true, .probe = {}}).samples == a.samples);
  CHECK(Enhance(x, set).samples == a.samples);

  CHECK(KindOf([&] { enh.Enhance(AudioBuffer(x.samples, 96000)); }) ==
        ErrorKind::kUnsupportedRate);
  CHECK(KindOf([&] { enh.Enhance(AudioBuffer(x.samples, 11025)); }) ==
        ErrorKind::kUnsupportedRate);
}

TEST_CASE("branches meet only at the post-network") {
  const auto store = InitialCheckpoints(Tiny());
  auto other_cfg = Tiny();
  other_cfg.predictor.seed = 99;
  other_cfg.adapter.model.seed = 98;
  const auto other = InitialCheckpoints(other_cfg);

  auto probe_run = [](const CheckpointStore& s) {
    std::map<std::string, AudioBuffer> seen;
    const AudioBuffer x(testing::SpeechLike(4000, 16000, 3), 16000);
    Enhance(x, PipelineCheckpointSet(s),
            {.probe = [&](const std::string& p, const AudioBuffer& b) { seen[p] = b; }});
    return seen;
  };
  const auto base = probe_run(store);
  auto new_pred = store;
  new_pred.ckpts.at(Stage::kPredictor) = other.ckpts.at(Stage::kPredictor);
  const auto p = probe_run(new_pred);
  CHECK(p.at("generative").samples == base.at("generative").samples);
  CHECK(p.at("predictive").samples != base.at("predictive").samples);
  auto new_ad = store;
  new_ad.ckpts.at(Stage::kAdapter) = other.ckpts.at(Stage::kAdapter);
  const auto g = probe_run(new_ad);
  CHECK(g.at("predictive").samples == base.at("predictive").samples);
  CHECK(g.at("generative").samples != base.at("generative").samples);
}

TEST_CASE("parameter and MAC accounting") {
  // Closed form for one linear layer.
  nn::Initializer init(1);
  nn::LinearLayer lin(3, 2, init);
  CHECK(lin.NumParameters() == 8);
  const std::size_t frames = 37;
  nn::MacCounter::Reset();
  {
    nn::NoGradGuard ng;
    lin(nn::Tensor::Zeros({frames, 3}));
  }
  CHECK(nn::MacCounter::Get() == 6 * frames);
  CHECK(macs::Linear(frames, 3, 2) == 6 * frames);

  const auto cfg = Tiny();
  const auto report = CountParamsAndMacs(cfg);
  const auto store = InitialCheckpoints(cfg);
  REQUIRE(report.components.size() == 5);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    CAPTURE(report.components[i].name);
    const auto n = Enumerate(store.Get(kAllStages[i]));
    CHECK(report.components[i].params == n);
    total += n;
  }
  CHECK(report.total_params() == total);

  // Analytic MACs against the counted forward pass on 1 s at 16 kHz.
  const Enhancer enh{PipelineCheckpointSet(store)};
  const AudioBuffer x(testing::SpeechLike(16000, 16000, 4), 16000);
  nn::MacCounter::Reset();
  enh.Enhance(x);
  CHECK(nn::MacCounter::Get() == report.total_macs());

  const std::string table = report.Render(true);
  CHECK(table.find("567.76") != std::string::npos);
  CHECK(table.find("total") != std::string::npos);
}

TEST_CASE("component MACs match counted forwards") {
  const auto cfg = RunConfig::Toy();
  const std::size_t n = 4800;
  nn::NoGradGuard ng;
  {
    encoder::Encoder m(cfg.encoder);
    nn::MacCounter::Reset();
    m.Forward(nn::Tensor::FromData({n}, testing::SpeechLike(n, 16000, 5)));
    CHECK(nn::MacCounter::Get() == macs::Encoder(cfg.encoder, n));
  }
  {
    predictor::Predictor m(cfg.predictor);
    nn::MacCounter::Reset();
    m.Forward(nn::Tensor::FromData({n}, testing::SpeechLike(n, 16000, 6)));
    CHECK(nn::MacCounter::Get() == macs::Predictor(cfg.predictor, n));
  }
  {
    gen::Vocoder m(cfg.vocoder.model);
    nn::MacCounter::Reset();
    m.Forward(nn::Tensor::Zeros({15, cfg.vocoder.model.input_dim}));
    CHECK(nn::MacCounter::Get() == macs::Vocoder(cfg.vocoder.model, 15));
  }
}

TEST_CASE("synthetic corpus and simulation") {
  const auto a = SyntheticSpeech(4800, 48000, 1);
  CHECK(SyntheticSpeech(4800, 48000, 1).samples == a.samples);
  CHECK(SyntheticSpeech(4800, 48000, 2).samples != a.samples);
  double p = 0.0;
  for (double v : a.samples) p += v * v;
  CHECK(std::sqrt(p / a.size()) == doctest::Approx(0.08).epsilon(1e-9));
  // Energy above 8 kHz for the bandwidth-extension target.
  CHECK(testing::BandPower(std::vector<double>(a.samples.begin(), a.samples.begin() + 2048),
                           48000, 8000, 20000) > 0.0);

  DataConfig d;
  d.n_utterances = 2;
  d.segment_s = 0.1;
  const auto pairs = SimulatePairs(d);
  REQUIRE(pairs.size() == 2);
  for (const auto& s : pairs) {
    CHECK(s.clean16.size() == 1600);
    CHECK(s.clean48.size() == 4800);
    CHECK(s.degraded16.size() == 1600);
    CHECK(s.degraded16.samples != s.clean16.samples);
  }
  CHECK(DataHash(pairs) == DataHash(SimulatePairs(d)));
  auto d2 = d;
  d2.seed = 8;
  CHECK(DataHash(pairs) != DataHash(SimulatePairs(d2)));

  const auto dir = std::filesystem::temp_directory_path() / "fse_pipeline_sim";
  std::filesystem::remove_all(dir);
  Simulate(d, dir);
  CHECK(std::filesystem::exists(dir / "synth0_degraded.wav"));
  CHECK(std::filesystem::exists(dir / "synth1.json"));
  CHECK(ReadWav(dir / "synth0_clean.wav").size() == 1600);
  std::filesystem::remove_all(dir);
}

TEST_CASE("manifest and noise directories") {
  const auto dir = std::filesystem::temp_directory_path() / "fse_pipeline_corpus";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "noise");
  std::vector<curation::ManifestEntry> m;
  for (int i = 0; i < 3; ++i) {
    const std::string id = "u" + std::to_string(i);
    WriteWav(dir / (id + ".wav"), SyntheticSpeech(8000, 16000, 50 + i), WavFormat::kFloat32);
    curation::ManifestEntry e;
    e.utterance_id = id;
    e.path = id + ".wav";
    e.duration_s = 0.5;
    e.verdict = i == 1 ? curation::Verdict::kDrop : curation::Verdict::kKeep;
    m.push_back(e);
  }
  curation::WriteManifest(dir / "m.jsonl", m);
  WriteWav(dir / "noise" / "n.wav", AudioBuffer(testing::RandomSignal(1000, 9), 16000),
           WavFormat::kFloat32);

  DataConfig d;
  d.clean_manifest = (dir / "m.jsonl").string();
  d.noise_dir = (dir / "noise").string();
  d.n_utterances = 5;
  d.segment_s = 0.25;
  const auto corpus = LoadCleanCorpus(d);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "u0");
  CHECK(corpus[1].id == "u2");
  CHECK(corpus[0].clean48.size() == 12000);
  const auto noise = NoiseFor(d, 0, 2500, 16000);
  CHECK(noise.size() == 2500);
  CHECK(noise.samples[1000] == noise.samples[0]);

  for (auto& e : m) e.verdict = curation::Verdict::kDrop;
  curation::WriteManifest(dir / "m.jsonl", m);
  CHECK(KindOf([&] { LoadCleanCorpus(d); }) == ErrorKind::kNoData);
  std::filesystem::remove_all(dir);
}

TEST_CASE("stage dependencies and provenance") {
  const auto cfg = Tiny();
  CheckpointStore none;
  CHECK(KindOf([&] { RunStage(Stage::kAdapter, cfg, none); }) == ErrorKind::kMissingDependency);
  CHECK(KindOf([&] { RunStage(Stage::kVocoder, cfg, none); }) == ErrorKind::kMissingDependency);

  CheckpointStore store;
  const auto enc = RunStage(Stage::kEncoder, cfg, store);
  CHECK(enc.checkpoint.kind == "encoder");
  CHECK(enc.checkpoint.provenance.contains("config_hash"));
  CHECK(enc.checkpoint.provenance.contains("data_hash"));
  CHECK(RunStage(Stage::kEncoder, cfg, store).checkpoint.Hash() == enc.checkpoint.Hash());
  store.ckpts.emplace(Stage::kEncoder, enc.checkpoint);

  CHECK(KindOf([&] { RunStage(Stage::kPostnet, cfg, store); }) ==
        ErrorKind::kMissingDependency);
  // The vocoder needs no adapter.
  const auto voc = RunStage(Stage::kVocoder, cfg, store);
  store.ckpts.emplace(Stage::kVocoder, voc.checkpoint);
  const std::string voc_hash = voc.checkpoint.Hash();
  store.ckpts.emplace(Stage::kAdapter, RunStage(Stage::kAdapter, cfg, store).checkpoint);
  store.ckpts.emplace(Stage::kPredictor, RunStage(Stage::kPredictor, cfg, store).checkpoint);
  const auto post = RunStage(Stage::kPostnet, cfg, store);
  CHECK(store.Get(Stage::kVocoder).Hash() == voc_hash);
  CHECK(post.checkpoint.provenance["vocoder"] == voc_hash);
  store.ckpts.emplace(Stage::kPostnet, post.checkpoint);
  CHECK_NOTHROW(PipelineCheckpointSet{store});
}

}  // namespace
}  // namespace fse::pipeline
