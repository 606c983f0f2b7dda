// tests/unit/curation_test.cc

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

#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "fse/curation/curation.h"
#include "fse/error.h"

namespace fse::curation {
namespace {

ManifestEntry Entry(const std::string& id, std::map<std::string, double> scores,
                    double duration = 1.0) {
  ManifestEntry e;
  e.utterance_id = id;
  e.path = id + ".wav";
  e.duration_s = duration;
  e.scores = std::move(scores);
  return e;
}

const std::vector<std::string> kAll = {"ovrl", "sig", "bak", "p808"};

std::vector<ManifestEntry> RandomManifest(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> s(2.0, 4.5), d(0.5, 20.0);
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<std::string, double> scores;
    for (const auto& k : kAll)
      if (rng() % 10 != 0) scores[k] = s(rng);
    out.push_back(Entry("u" + std::to_string(i), scores, d(rng)));
  }
  return out;
}

TEST_CASE("filter verdicts") {
  const auto keep = Entry("a", {{"ovrl", 3.2}, {"sig", 3.1}, {"bak", 3.5}, {"p808", 3.0}});
  const auto low = Entry("b", {{"ovrl", 3.2}, {"sig", 2.99}, {"bak", 3.5}, {"p808", 3.4}});
  const auto missing = Entry("c", {{"ovrl", 3.2}, {"sig", 3.1}, {"bak", 3.5}});
  const auto out = ApplyFilter({keep, low, missing}, kAll, 3.0);
  REQUIRE(out.size() == 3);
  CHECK(out[0].utterance_id == "a");
  CHECK(out[0].verdict == Verdict::kKeep);
  CHECK(out[1].verdict == Verdict::kDrop);
  CHECK(out[1].reason == "below threshold");
  CHECK(out[2].verdict == Verdict::kDrop);
  CHECK(out[2].reason == "missing score");
  // Inputs untouched.
  CHECK(keep.verdict == Verdict::kUncurated);

  CHECK_THROWS_AS(ApplyFilter({keep}, {}, 3.0), Error);
  try {
    ApplyFilter({keep}, std::vector<std::string>{}, 3.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidFilter);
  }
  try {
    ApplyFilter({keep}, kAll, std::nan(""));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidFilter);
  }
}

TEST_CASE("corpus bypass") {
  auto ears = Entry("e", {});
  ears.corpus = "ears";
  auto other = Entry("o", {});
  other.corpus = "vctk";
  const auto out = ApplyFilter({ears, other}, FilterConfig{});
  CHECK(out[0].verdict == Verdict::kKeep);
  CHECK(out[0].reason == "corpus bypass");
  CHECK(out[1].verdict == Verdict::kDrop);
  // Without the config the bypass does not apply.
  CHECK(ApplyFilter({ears}, kAll, 3.0)[0].verdict == Verdict::kDrop);
}

TEST_CASE("filter is monotone in threshold") {
  const auto m = RandomManifest(300, 1);
  std::vector<ManifestEntry> prev;
  for (double th = 2.0; th <= 4.5; th += 0.125) {
    const auto cur = ApplyFilter(m, kAll, th);
    if (!prev.empty())
      for (std::size_t i = 0; i < m.size(); ++i)
        if (prev[i].verdict == Verdict::kDrop) REQUIRE(cur[i].verdict == Verdict::kDrop);
    prev = cur;
  }
}

TEST_CASE("verdicts are order independent") {
  auto m = RandomManifest(100, 2);
  const auto a = ApplyFilter(m, kAll, 3.0);
  std::mt19937_64 rng(3);
  std::shuffle(m.begin(), m.end(), rng);
  const auto b = ApplyFilter(m, kAll, 3.0);
  std::map<std::string, Verdict> va;
  for (const auto& e : a) va[e.utterance_id] = e.verdict;
  for (const auto& e : b) CHECK(va.at(e.utterance_id) == e.verdict);
}

TEST_CASE("summarize") {
  CHECK(Summarize({}) == CurationReport{});
  std::vector<ManifestEntry> hours;
  for (int i = 0; i < 3; ++i) hours.push_back(Entry("h" + std::to_string(i), {}, 3600.0));
  for (auto& e : hours) e.verdict = Verdict::kKeep;
  CHECK(Summarize(hours).kept_hours == 3.0);

  auto m = ApplyFilter(RandomManifest(500, 4), kAll, 3.0);
  m.push_back(Entry("raw", {}, 2.0));
  const auto r = Summarize(m);
  // Recount oracle.
  std::size_t kept = 0, dropped = 0, missing = 0, below = 0, unc = 0;
  double secs = 0.0;
  for (const auto& e : m) {
    if (e.verdict == Verdict::kKeep) {
      ++kept;
      secs += e.duration_s;
    } else if (e.verdict == Verdict::kDrop) {
      ++dropped;
      (e.reason == "missing score" ? missing : below)++;
    } else {
      ++unc;
    }
  }
  CHECK(r.kept == kept);
  CHECK(r.dropped == dropped);
  CHECK(r.uncurated == unc);
  CHECK(r.kept_hours == doctest::Approx(secs / 3600.0).epsilon(1e-12));
  CHECK(r.drop_reasons.at("missing score") == missing);
  CHECK(r.drop_reasons.at("below threshold") == below);

  std::mt19937_64 rng(5);
  std::shuffle(m.begin(), m.end(), rng);
  const auto r2 = Summarize(m);
  CHECK(r2.kept == r.kept);
  CHECK(r2.drop_reasons == r.drop_reasons);
  CHECK(r2.kept_hours == doctest::Approx(r.kept_hours).epsilon(1e-12));
  CHECK(nlohmann::json(r).get<CurationReport>() == r);
}

TEST_CASE("manifest io") {
  const auto dir = std::filesystem::temp_directory_path() / "fse_curation_test";
  std::filesystem::create_directories(dir);
  auto m = ApplyFilter(RandomManifest(20, 6), kAll, 3.0);
  m[3].corpus = "ears";
  WriteManifest(dir / "m.jsonl", m);
  const auto back = ReadManifest(dir / "m.jsonl");
  CHECK(back == m);

  m.push_back(m[0]);
  WriteManifest(dir / "dup.jsonl", m);
  CHECK_THROWS_AS(ReadManifest(dir / "dup.jsonl"), Error);
  auto bad = Entry("z", {}, 0.0);
  CHECK_THROWS_AS(ValidateManifest({bad}), Error);
  CHECK_THROWS_AS(ReadManifest(dir / "absent.jsonl"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("preprocessor registry") {
  PreprocessorRegistry reg;
  reg.Register("dpcrn", [](const AudioBuffer& x) {
    AudioBuffer y = x;
    for (auto& s : y.samples) s *= 0.5;
    return y;
  });
  CHECK(reg.Has("dpcrn"));
  CHECK(reg.Names() == std::vector<std::string>{"dpcrn"});
  try {
    reg.Register("dpcrn", [](const AudioBuffer& x) { return x; });
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDuplicateHook);
  }
  const AudioBuffer x({1.0, -2.0, 0.5}, 16000);
  std::vector<std::string> notices;
  const auto y = reg.Apply({"scnet"}, x, &notices);
  CHECK(y.samples == x.samples);
  REQUIRE(notices.size() == 1);
  CHECK(notices[0].find("scnet") != std::string::npos);
  CHECK(reg.Apply({"scnet", "dpcrn"}, x).samples == std::vector<double>{0.5, -1.0, 0.25});
}

TEST_CASE("scorer keys stay stable") {
  int calls = 0;
  Scorer s({"dnsmos", [&](const AudioBuffer&) {
              ++calls;
              std::map<std::string, double> m{{"ovrl", 3.0}, {"sig", 3.0}};
              if (calls > 2) m["extra"] = 1.0;
              return m;
            }});
  const AudioBuffer x({0.1}, 16000);
  CHECK(s(x).size() == 2);
  CHECK(s(x).size() == 2);
  CHECK_THROWS_AS(s(x), Error);
}

}  // namespace
}  // namespace fse::curation
