// tests/unit/plc_test.cc

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

#include <random>

#include "doctest.h"
#include "fse/error.h"
#include "fse/plc/plc.h"
#include "test_util.h"

namespace fse::plc {
namespace {

AudioBuffer Speech(std::size_t n, std::uint64_t seed) {
  return AudioBuffer(testing::SpeechLike(n, 16000, seed), 16000);
}

TEST_CASE("inject loss zeroes exactly the lost frames") {
  auto x = Speech(16000, 1);
  CHECK(InjectLoss(x, {}).samples == x.samples);
  auto y = InjectLoss(x, {320, {5, 6, 7}});
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i >= 1600 && i < 2560) CHECK(y.samples[i] == 0.0);
    else CHECK(y.samples[i] == x.samples[i]);
  }
  CHECK(InjectLoss(y, {320, {5, 6, 7}}).samples == y.samples);
}

TEST_CASE("inject loss nonzero set equals complement oracle") {
  std::mt19937_64 rng(2);
  auto x = Speech(8000, 2);
  LossMask m;
  for (std::size_t f = 0; f < 25; ++f)
    if (rng() % 4 == 0) m.lost_frames.push_back(f);
  auto y = InjectLoss(x, m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool lost = std::find(m.lost_frames.begin(), m.lost_frames.end(), i / 320) !=
                      m.lost_frames.end();
    CHECK((y.samples[i] != 0.0) == (!lost && x.samples[i] != 0.0));
  }
}

TEST_CASE("inject loss rejects bad masks") {
  auto x = Speech(1000, 3);
  CHECK_THROWS_AS(InjectLoss(x, {320, {4}}), Error);
  CHECK_THROWS_AS(InjectLoss(x, {320, {2, 1}}), Error);
  CHECK_THROWS_AS(InjectLoss(x, {320, {1, 1}}), Error);
  try {
    InjectLoss(x, {320, {9}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidMask);
  }
  CHECK_NOTHROW(InjectLoss(x, {320, {3}}));  // partial last frame
}

TEST_CASE("detect recovers injected masks") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::mt19937_64 rng(100 + s);
    auto x = Speech(16000 + s * 37, 10 + s);
    LossMask m;
    for (std::size_t f = 0; f < plc::NumFrames(x.size(), 320); ++f)
      if (rng() % 5 == 0) m.lost_frames.push_back(f);
    CHECK(DetectLoss(InjectLoss(x, m)) == m);
  }
}

TEST_CASE("detect edge cases") {
  auto x = Speech(4000, 4);
  CHECK(DetectLoss(x).lost_frames.empty());
  auto z = DetectLoss(AudioBuffer(std::vector<double>(1000, 0.0), 16000));
  CHECK(z.lost_frames == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK_THROWS_AS(DetectLoss(AudioBuffer({}, 16000)), Error);
  LossMask m{320, {2, 7}};
  for (double g : {1e-3, 0.1, 1.0}) {
    auto y = InjectLoss(x, {320, {2, 7}});
    for (double& v : y.samples) v *= g;
    CHECK(DetectLoss(y) == m);
  }
}

TEST_CASE("embed mask") {
  CHECK(EmbedMask({}, 10) == std::vector<bool>(10, false));
  auto f = EmbedMask({320, {0, 9}}, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(f[i] == (i == 0 || i == 9));
  CHECK_THROWS_AS(EmbedMask({320, {10}}, 10), Error);
}

}  // namespace
}  // namespace fse::plc
