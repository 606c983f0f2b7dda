// tests/unit/gen_test.cc

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
#include <map>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fse/error.h"
#include "fse/gen/gan.h"
#include "fse/gen/models.h"
#include "fse/gen/train.h"
#include "grad_check.h"
#include "test_util.h"

namespace fse::gen {
namespace {

using nn::Tensor;

BackboneConfig SmallAdapter() {
  BackboneConfig c;
  c.input_dim = 32;
  c.hidden_dim = 24;
  c.n_blocks = 2;
  c.intermediate_dim = 48;
  return c;
}

BackboneConfig SmallVocoder() {
  BackboneConfig c = SmallAdapter();
  c.has_istft_head = true;
  c.istft_cfg = StftConfig::Canonical();
  return c;
}

DiscriminatorSuiteConfig SmallSuite() {
  DiscriminatorSuiteConfig c;
  c.repr_disc_dims = 32;
  c.channels = 4;
  return c;
}

encoder::EncoderConfig SmallEncoder() {
  encoder::EncoderConfig c;
  c.conv_channels = 16;
  c.n_transformer_layers = 2;
  c.d_model = 32;
  c.n_heads = 4;
  c.ffn_dim = 64;
  return c;
}

Tensor RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
  return Tensor::FromData({rows, cols}, testing::RandomSignal(rows * cols, seed, scale));
}

// Multiples of 2^-8 in [-4, 4]: sums and differences stay exact.
Tensor DyadicMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(-1024, 1024);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = u(rng) / 256.0;
  return Tensor::FromData({rows, cols}, v);
}

std::map<std::string, std::vector<double>> Weights(const nn::Module& m) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [name, t] : m.NamedParameters()) out[name] = t.ToVector();
  return out;
}

// Plain-loop re-evaluation of the adapter equations.
using Mat = std::vector<std::vector<double>>;

Mat ToMat(const Tensor& t) {
  Mat m(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) m[i][j] = t.values()[i * t.dim(1) + j];
  return m;
}

Mat Dense(const Mat& x, const std::vector<double>& w, const std::vector<double>& b,
          std::size_t out) {
  const std::size_t in = x[0].size();
  Mat y(x.size(), std::vector<double>(out));
  for (std::size_t t = 0; t < x.size(); ++t)
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[o * in + i] * x[t][i];
      y[t][o] = acc;
    }
  return y;
}

Mat Norm(const Mat& x, const std::vector<double>& g, const std::vector<double>& b) {
  Mat y = x;
  for (auto& row : y) {
    double mu = 0, var = 0;
    for (double v : row) mu += v;
    mu /= row.size();
    for (double v : row) var += (v - mu) * (v - mu);
    var /= row.size();
    for (std::size_t i = 0; i < row.size(); ++i)
      row[i] = (row[i] - mu) / std::sqrt(var + 1e-5) * g[i] + b[i];
  }
  return y;
}

// 'Same' conv over frames, k = 7; depthwise when `groups` equals channels.
Mat FrameConv(const Mat& x, const std::vector<double>& w, const std::vector<double>& b,
              std::size_t out, bool depthwise) {
  const long frames = static_cast<long>(x.size());
  const std::size_t in = x[0].size();
  Mat y(x.size(), std::vector<double>(out));
  for (long t = 0; t < frames; ++t)
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (long k = 0; k < 7; ++k) {
        const long s = t + k - 3;
        if (s < 0 || s >= frames) continue;
        if (depthwise) acc += w[o * 7 + k] * x[s][o];
        else
          for (std::size_t i = 0; i < in; ++i) acc += w[(o * in + i) * 7 + k] * x[s][i];
      }
      y[t][o] = acc;
    }
  return y;
}

Mat AdapterOracle(const Adapter& a, const Tensor& fused) {
  auto w = Weights(a);
  const auto& c = a.config();
  Mat h = FrameConv(ToMat(fused), w["backbone.embed.weight"], w["backbone.embed.bias"],
                    c.hidden_dim, false);
  h = Norm(h, w["backbone.embed_norm.gamma"], w["backbone.embed_norm.beta"]);
  for (std::size_t i = 0; i < c.n_blocks; ++i) {
    const std::string p = "backbone.block" + std::to_string(i) + ".";
    Mat u = FrameConv(h, w[p + "dwconv.weight"], w[p + "dwconv.bias"], c.hidden_dim, true);
    u = Norm(u, w[p + "norm.gamma"], w[p + "norm.beta"]);
    u = Dense(u, w[p + "pw1.weight"], w[p + "pw1.bias"], c.intermediate_dim);
    for (auto& row : u)
      for (auto& v : row) v = 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2));
    u = Dense(u, w[p + "pw2.weight"], w[p + "pw2.bias"], c.hidden_dim);
    for (std::size_t t = 0; t < h.size(); ++t)
      for (std::size_t d = 0; d < c.hidden_dim; ++d) h[t][d] += w[p + "scale"][d] * u[t][d];
  }
  h = Norm(h, w["backbone.final_norm.gamma"], w["backbone.final_norm.beta"]);
  return Dense(h, w["out.weight"], w["out.bias"], c.input_dim);
}

TEST_CASE("backbone configs") {
  CHECK_NOTHROW(BackboneConfig::ToyAdapter().Validate());
  CHECK_NOTHROW(BackboneConfig::FullVocoder().Validate());
  const auto full = BackboneConfig::FullVocoder();
  CHECK(full.hidden_dim == 1024);
  CHECK(full.n_blocks == 12);
  CHECK(full.intermediate_dim == 3072);
  CHECK(full.istft_cfg->fft_size == 1280);
  CHECK(full.istft_cfg->hop_size == 320);
  const auto toy = BackboneConfig::ToyAdapter();
  CHECK(toy.hidden_dim == 192);
  CHECK(toy.n_blocks == 4);
  CHECK(toy.intermediate_dim == 576);
  auto bad = BackboneConfig::ToyAdapter();
  bad.has_istft_head = true;
  CHECK_THROWS_AS(bad.Validate(), Error);
  CHECK_THROWS_AS(Adapter(BackboneConfig::ToyVocoder()), Error);
  CHECK_THROWS_AS(Vocoder(BackboneConfig::ToyAdapter()), Error);
  nlohmann::json j = SmallVocoder();
  CHECK(j.get<BackboneConfig>() == SmallVocoder());
  nlohmann::json js = SmallSuite();
  CHECK(js.get<DiscriminatorSuiteConfig>() == SmallSuite());
  nlohmann::json jt = GenTrainConfig::ToyVocoder();
  CHECK(jt.get<GenTrainConfig>() == GenTrainConfig::ToyVocoder());
}

TEST_CASE("adapter conditioning is input-additive") {
  Adapter a(SmallAdapter());
  const Tensor zero = Tensor::Zeros({12, 32});
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const Tensor r_p = DyadicMatrix(12, 32, 10 + trial);
    const Tensor r_a0 = DyadicMatrix(12, 32, 20 + trial);
    const Tensor delta = DyadicMatrix(12, 32, 30 + trial);
    CHECK(a.Adapt(r_p, zero).values() == a.Forward(r_p).values());
    CHECK(Adapter::FuseInputs(r_p, r_a0).values() == Adapter::FuseInputs(r_a0, r_p).values());
    CHECK(a.Adapt(nn::Add(r_p, delta), nn::Sub(r_a0, delta)).values() ==
          a.Adapt(r_p, r_a0).values());
  }
  CHECK_THROWS_AS(Adapter::FuseInputs(Tensor::Zeros({12, 32}), Tensor::Zeros({11, 32})), Error);
  CHECK_THROWS_AS(a.Forward(Tensor::Zeros({12, 31})), Error);
}

TEST_CASE("adapter matches a plain-loop re-evaluation") {
  Adapter a(SmallAdapter());
  const Tensor fused = RandomMatrix(9, 32, 4);
  const auto got = a.Forward(fused).ToVector();
  const Mat want = AdapterOracle(a, fused);
  double err = 0;
  for (std::size_t t = 0; t < 9; ++t)
    for (std::size_t d = 0; d < 32; ++d) err = std::max(err, std::abs(got[t * 32 + d] - want[t][d]));
  CHECK(err < 1e-5);
}

TEST_CASE("vocoder length, silence and range") {
  Vocoder v(SmallVocoder());
  CHECK(v.Vocode(RandomMatrix(50, 32, 1)).size() == 16000);
  CHECK(v.Vocode(RandomMatrix(7, 32, 1)).size() == 7 * 320);

  Vocoder silent(SmallVocoder(), /*zero_init_head=*/true);
  for (double s : silent.Vocode(Tensor::Zeros({10, 32})).samples) REQUIRE(s == 0.0);

  // Each synthesis frame is bounded by the magnitude cap, so a sample is
  // bounded by 100 * sum|w| / sum w^2 over the frames covering it.
  const int n_fft = 1280, hop = 320;
  const std::size_t frames = 20;
  std::vector<double> bound(frames * hop, 0.0);
  {
    std::vector<double> wsum(bound.size(), 0.0), w2sum(bound.size(), 0.0);
    for (std::size_t t = 0; t < frames; ++t)
      for (int j = 0; j < n_fft; ++j) {
        const long n = static_cast<long>(t) * hop - n_fft / 2 + j;
        if (n < 0 || n >= static_cast<long>(bound.size())) continue;
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * j / n_fft);
        wsum[n] += w;
        w2sum[n] += w * w;
      }
    for (std::size_t n = 0; n < bound.size(); ++n) bound[n] = 100.0 * wsum[n] / w2sum[n];
  }
  Vocoder wild(SmallVocoder());
  const Tensor r = RandomMatrix(frames, 32, 9, 50.0);
  const auto y = wild.Vocode(r).samples;
  for (std::size_t n = 0; n < y.size(); ++n) {
    REQUIRE(std::isfinite(y[n]));
    REQUIRE(std::abs(y[n]) <= bound[n] * (1 + 1e-9));
  }
  nn::NoGradGuard ng;
  const auto spec = wild.Spectrum(r).ToVector();
  for (std::size_t k = 0; k < spec.size(); k += 2) {
    const double mag = std::hypot(spec[k], spec[k + 1]);
    REQUIRE(mag <= 100.0 * (1 + 1e-12));
  }

  Tensor bad = RandomMatrix(3, 32, 2);
  bad.mutable_data()[5] = std::nan("");
  CHECK_THROWS_AS(v.Vocode(bad), Error);
  CHECK_THROWS_AS(v.Vocode(RandomMatrix(3, 31, 2)), Error);
}

TEST_CASE("MPD fold shape") {
  const auto x = testing::RandomSignal(1001, 3);
  const Tensor t = Tensor::FromData({x.size()}, x);
  const Tensor f3 = MpdFold(t, 3);
  CHECK(f3.shape() == nn::Shape{1, 1, 334, 3});
  CHECK(f3.values()[1000] == x[1000]);
  CHECK(f3.values()[1001] == x[999]);  // reflected tail
  CHECK(MpdFold(t, 7).shape() == nn::Shape{1, 1, 143, 7});
  CHECK(MpdFold(t, 11).shape() == nn::Shape{1, 1, 91, 11});
  for (std::size_t p : {2u, 5u})
    CHECK(MpdFold(t, p).dim(2) == (1001 + p - 1) / p);
}

TEST_CASE("discriminator outputs and kind checks") {
  auto cfg = SmallSuite();
  cfg.stft_disc_resolutions.pop_back();  // 2 resolutions
  DiscriminatorSuite suite(cfg);
  const Tensor audio = Tensor::FromData({4000}, testing::RandomSignal(4000, 5));
  const auto in = DiscriminatorInput::Audio(audio);
  CHECK(suite.Discriminate(in, DiscFamily::kStft).logits.size() == 6);
  CHECK(suite.Discriminate(in, DiscFamily::kPeriod).logits.size() == 5);
  const auto all = suite.Discriminate(in);
  CHECK(all.logits.size() == 11);
  CHECK(all.features.size() == 11);
  const Tensor rep = RandomMatrix(10, 32, 6);
  CHECK(suite.Discriminate(DiscriminatorInput::Representation(rep)).logits.size() == 1);

  CHECK_THROWS_AS(suite.Discriminate(in, DiscFamily::kRepresentation), Error);
  CHECK_THROWS_AS(suite.Discriminate(DiscriminatorInput::Representation(rep), DiscFamily::kAudio),
                  Error);
  CHECK_THROWS_AS(suite.Discriminate({InputKind::kAudio, rep}), Error);
  try {
    suite.Discriminate(in, DiscFamily::kRepresentation);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTypeMismatch);
  }

  CHECK(FeatureMatchingLoss(all, suite.Discriminate(in)).item() == 0.0);

  DiscriminatorSuiteConfig dup = SmallSuite();
  dup.mpd_periods = {2, 3, 2};
  CHECK_THROWS_AS(dup.Validate(), Error);
  dup = SmallSuite();
  dup.stft_disc_resolutions.resize(1);
  CHECK_THROWS_AS(dup.Validate(), Error);
}

TEST_CASE("least-squares objectives on known logits") {
  DiscOutput real, fake;
  real.logits = {Tensor::FromData({2}, {1.0, 3.0}), Tensor::FromData({1}, {0.5})};
  fake.logits = {Tensor::FromData({2}, {0.0, 2.0}), Tensor::FromData({1}, {-1.0})};
  // D: mean((r-1)^2) + mean(f^2) per map.
  CHECK(LsganDiscriminatorLoss(real, fake).item() == doctest::Approx(2.0 + 2.0 + 0.25 + 1.0));
  // G: mean((f-1)^2) per map.
  CHECK(LsganGeneratorLoss(fake).item() == doctest::Approx(1.0 + 4.0));
  real.features = {{Tensor::FromData({2}, {1.0, 1.0})}};
  fake.features = {{Tensor::FromData({2}, {0.0, 3.0})}};
  CHECK(FeatureMatchingLoss(real, fake).item() == doctest::Approx(1.5));
}

TEST_CASE("multi-scale mel loss against a direct-DFT oracle") {
  const std::size_t n = 3000;
  const auto a = testing::SpeechLike(n, 16000, 1);
  const auto b = testing::SpeechLike(n, 16000, 2);
  const MultiScaleMelLoss mel(16000);
  REQUIRE(mel.scales().size() == 4);
  double oracle = 0;
  for (const auto& sc : mel.scales()) {
    CHECK(sc.hop_size == sc.fft_size / 4);
    const auto fb = MelFilterbank::Build(sc.fft_size / 16, sc.fft_size, 16000);
    std::size_t frames = 0;
    const auto sa = testing::NaiveStft(a, sc.fft_size, sc.hop_size, &frames);
    const auto sb = testing::NaiveStft(b, sc.fft_size, sc.hop_size, &frames);
    const std::size_t bins = sc.num_bins();
    double acc = 0;
    for (std::size_t t = 0; t < frames; ++t)
      for (int m = 0; m < fb.n_mels; ++m) {
        double pa = 0, pb = 0;
        for (std::size_t k = 0; k < bins; ++k) {
          pa += fb.weights(m, k) * std::norm(sa[t * bins + k]);
          pb += fb.weights(m, k) * std::norm(sb[t * bins + k]);
        }
        acc += std::abs(std::log(pa + 1e-5) - std::log(pb + 1e-5));
      }
    oracle += acc / static_cast<double>(frames * fb.n_mels);
  }
  const Tensor ta = Tensor::FromData({n}, a), tb = Tensor::FromData({n}, b);
  CHECK(std::abs(mel(ta, tb).item() - oracle) < 1e-5);
  CHECK(mel(ta, ta).item() == 0.0);
  CHECK(mel(nn::Scale(ta, -1.0), ta).item() < 1e-12);
  CHECK_THROWS_AS(mel(ta, Tensor::Zeros({n - 1})), Error);
  // Matches the non-differentiable log-mel path at one scale.
  const auto ref = MelSpectrogram(AudioBuffer(a, 16000), mel.scales()[2], mel.filterbanks()[2]);
  CHECK(testing::MaxAbsDiff(mel.LogMel(ta, 2).ToVector(), ref.data) < 1e-9);
}

TEST_CASE("vocoder loss terms") {
  DiscriminatorSuite suite(SmallSuite());
  const auto y = AudioBuffer(testing::SpeechLike(2400, 16000, 3), 16000);
  GanLossWeights none{15.0, 0.0, 0.0};
  auto same = VocoderLoss(y, y, suite, none);
  CHECK(same.total.item() == 0.0);
  AudioBuffer neg = y;
  for (auto& s : neg.samples) s = -s;
  auto flipped = VocoderLoss(neg, y, suite, GanLossWeights{});
  CHECK(flipped.Term("mel") < 1e-12);
  CHECK(flipped.Term("adv") > 0.0);
  CHECK(flipped.Term("fm") > 0.0);
  CHECK(flipped.Term("total") == doctest::Approx(15.0 * flipped.Term("mel") +
                                                 flipped.Term("adv") + 2.0 * flipped.Term("fm")));
  CHECK_THROWS_AS(VocoderLoss(AudioBuffer(std::vector<double>(2399, 0.1), 16000), y, suite, none),
                  Error);
  CHECK_THROWS_AS(VocoderLoss(AudioBuffer(y.samples, 24000), y, suite, none), Error);
}

TEST_CASE("adapter loss terms") {
  DiscriminatorSuite suite(SmallSuite());
  const Tensor a = RandomMatrix(8, 32, 1), b = RandomMatrix(8, 32, 2);
  CHECK(AdapterLoss(a, a, suite, {15.0, 0.0, 0.0}).total.item() == 0.0);
  double mse = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.numel());
  CHECK(AdapterLoss(a, b, suite, {15.0, 0.0, 0.0}).total.item() == doctest::Approx(mse).epsilon(1e-12));
  const auto full = AdapterLoss(a, b, suite, GanLossWeights{});
  CHECK(full.Term("adv") >= 0.0);
  CHECK(full.Term("fm") > 0.0);
  CHECK_THROWS_AS(AdapterLoss(a, RandomMatrix(7, 32, 2), suite, {}), Error);
}

TEST_CASE("gradient checks") {
  SUBCASE("adapter mse through the adapter") {
    Adapter a(SmallAdapter());
    DiscriminatorSuite suite(SmallSuite());
    const Tensor fused = RandomMatrix(6, 32, 3), target = RandomMatrix(6, 32, 4);
    auto r = testing::GradCheck(
        a.Parameters(), [&] { return AdapterLoss(a.Forward(fused), target, suite, {1, 0, 0}).total; },
        32, 5);
    CHECK(r.checked == 32);
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("adapter full loss with respect to the prediction") {
    DiscriminatorSuite suite(SmallSuite());
    suite.SetRequiresGrad(false);
    Tensor r_hat = Tensor::Parameter({6, 32}, testing::RandomSignal(192, 6));
    const Tensor target = RandomMatrix(6, 32, 7);
    auto r = testing::GradCheck({r_hat},
                                [&] { return AdapterLoss(r_hat, target, suite, {}).total; }, 32, 8);
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("vocoder mel term through the vocoder") {
    Vocoder v(SmallVocoder());
    const MultiScaleMelLoss mel(16000);
    const Tensor r = RandomMatrix(8, 32, 5);
    const Tensor y = Tensor::FromData({2560}, testing::SpeechLike(2560, 16000, 5));
    auto r2 = testing::GradCheck(v.Parameters(), [&] { return mel(v.Forward(r), y); }, 32, 9);
    CHECK(r2.checked == 32);
    CHECK(r2.max_rel_error < 1e-4);
  }
}

TEST_CASE("generator and discriminator gradients stay separate") {
  Vocoder v(SmallVocoder());
  DiscriminatorSuite suite(SmallSuite());
  const MultiScaleMelLoss mel(16000);
  const Tensor r = RandomMatrix(8, 32, 5);
  const Tensor y = Tensor::FromData({2560}, testing::SpeechLike(2560, 16000, 5));
  auto all_zero = [](const nn::Module& m) {
    for (const auto& p : m.Parameters())
      for (double g : p.grad())
        if (g != 0.0) return false;
    return true;
  };
  suite.SetRequiresGrad(false);
  Tensor y_hat = v.Forward(r);
  VocoderLoss(y_hat, y, suite, mel, {}).total.Backward();
  CHECK(all_zero(suite));
  CHECK_FALSE(all_zero(v));
  v.ZeroGrad();
  suite.audio_part().SetRequiresGrad(true);
  LsganDiscriminatorLoss(suite.Discriminate(DiscriminatorInput::Audio(y)),
                         suite.Discriminate(DiscriminatorInput::Audio(y_hat.Detach())))
      .Backward();
  CHECK(all_zero(v));
  CHECK_FALSE(all_zero(suite.audio_part()));
}

struct Fixture {
  nn::Checkpoint encoder_ckpt;
  AudioBuffer clean;
  Fixture() : clean(testing::SpeechLike(4800, 16000, 7), 16000) {
    encoder::Encoder enc(SmallEncoder());
    encoder_ckpt = nn::Checkpoint::FromModule("encoder", SmallEncoder(), enc);
  }
  static GenTrainConfig Vocoder() {
    return {SmallVocoder(), SmallSuite(), GanLossWeights{}};
  }
  static GenTrainConfig Adapter() {
    return {SmallAdapter(), SmallSuite(), GanLossWeights{}};
  }
};

TEST_CASE("generative-branch training contracts") {
  Fixture f;
  const nn::TrainOptions zero{.steps = 0};
  CHECK_THROWS_AS(TrainVocoder({f.clean}, nullptr, f.Vocoder(), zero), Error);
  try {
    TrainAdapter({{f.clean, f.clean, {}}}, nullptr, f.Adapter(), zero);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingDependency);
  }
  CHECK_THROWS_AS(TrainVocoder({}, &f.encoder_ckpt, f.Vocoder(), zero), Error);
  auto wide = f.Vocoder();
  wide.model.input_dim = 48;
  CHECK_THROWS_AS(TrainVocoder({f.clean}, &f.encoder_ckpt, wide, zero), Error);

  gen::Vocoder fresh(SmallVocoder());
  const auto untouched = TrainVocoder({f.clean}, &f.encoder_ckpt, f.Vocoder(), zero);
  CHECK(untouched.checkpoint.WeightsHash() ==
        nn::Checkpoint::FromModule("vocoder", f.Vocoder(), fresh).WeightsHash());
  CHECK(untouched.steps_run == 0);
  auto v = LoadVocoder(untouched.checkpoint);
  CHECK(Weights(*v) == Weights(fresh));
  CHECK_THROWS_AS(LoadAdapter(untouched.checkpoint), Error);
}

TEST_CASE("vocoder overfits one clean utterance") {
  Fixture f;
  const nn::TrainOptions opt{.steps = 200, .lr = 2e-3, .stop_ratio = 0.5};
  const auto r = TrainVocoder({f.clean}, &f.encoder_ckpt, f.Vocoder(), opt);
  MESSAGE("vocoder mel " << r.initial_loss << " -> " << r.final_loss << " in " << r.steps_run);
  CHECK(r.final_loss < 0.5 * r.initial_loss);
  CHECK(r.log.Series("d_loss").size() == static_cast<std::size_t>(r.steps_run));
  const auto again = TrainVocoder({f.clean}, &f.encoder_ckpt, f.Vocoder(), opt);
  CHECK(again.checkpoint.Hash() == r.checkpoint.Hash());
}

TEST_CASE("adapter regresses the clean representation") {
  Fixture f;
  const nn::TrainOptions opt{.steps = 200, .lr = 2e-3};
  const auto r = TrainAdapter({{f.clean, f.clean, {}}}, &f.encoder_ckpt, f.Adapter(), opt);
  MESSAGE("adapter mse " << r.initial_loss << " -> " << r.final_loss);
  CHECK(r.final_loss < 0.05 * r.initial_loss);
  CHECK(r.checkpoint.provenance["encoder"] == f.encoder_ckpt.Hash());
  auto a = LoadAdapter(r.checkpoint);
  CHECK(a->config() == SmallAdapter());
}

}  // namespace
}  // namespace fse::gen
