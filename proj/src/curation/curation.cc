// src/curation/curation.cc

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

#include "fse/curation/curation.h"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include "fse/error.h"

namespace fse::curation {

std::string VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kKeep:
      return "keep";
    case Verdict::kDrop:
      return "drop";
    case Verdict::kUncurated:
      return "uncurated";
  }
  return "uncurated";
}

Verdict VerdictFromName(const std::string& name) {
  if (name == "keep") return Verdict::kKeep;
  if (name == "drop") return Verdict::kDrop;
  if (name == "uncurated") return Verdict::kUncurated;
  throw Error(ErrorKind::kInvalidParameter, "unknown verdict '" + name + "'");
}

void to_json(nlohmann::json& j, const ManifestEntry& e) {
  j = {{"utterance_id", e.utterance_id},
       {"path", e.path},
       {"sample_rate", e.sample_rate},
       {"duration_s", e.duration_s},
       {"scores", e.scores},
       {"verdict", VerdictName(e.verdict)}};
  if (!e.corpus.empty()) j["corpus"] = e.corpus;
  if (!e.reason.empty()) j["reason"] = e.reason;
}

void from_json(const nlohmann::json& j, ManifestEntry& e) {
  e.utterance_id = j.at("utterance_id").get<std::string>();
  e.path = j.value("path", std::string());
  e.sample_rate = j.value("sample_rate", 16000);
  e.duration_s = j.at("duration_s").get<double>();
  e.scores = j.value("scores", std::map<std::string, double>());
  e.verdict = VerdictFromName(j.value("verdict", std::string("uncurated")));
  e.corpus = j.value("corpus", std::string());
  e.reason = j.value("reason", std::string());
}

void ValidateManifest(const std::vector<ManifestEntry>& entries) {
  std::unordered_set<std::string> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.utterance_id).second)
      throw Error(ErrorKind::kInvalidParameter, "duplicate utterance_id '" + e.utterance_id + "'");
    if (!(e.duration_s > 0.0))
      throw Error(ErrorKind::kInvalidParameter,
                  "non-positive duration for '" + e.utterance_id + "'");
  }
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<ManifestEntry>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kIo,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  ValidateManifest(out);
  return out;
}

void WriteManifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& e : entries) f << nlohmann::json(e).dump() << '\n';
  if (!f) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

void to_json(nlohmann::json& j, const FilterConfig& c) {
  j = {{"required_scores", c.required_scores},
       {"threshold", c.threshold},
       {"bypass_corpora", c.bypass_corpora}};
}

void from_json(const nlohmann::json& j, FilterConfig& c) {
  FilterConfig d;
  c.required_scores = j.value("required_scores", d.required_scores);
  c.threshold = j.value("threshold", d.threshold);
  c.bypass_corpora = j.value("bypass_corpora", d.bypass_corpora);
}

namespace {

void Judge(ManifestEntry& e, const std::vector<std::string>& required, double threshold) {
  for (const auto& name : required) {
    const auto it = e.scores.find(name);
    if (it == e.scores.end()) {
      e.verdict = Verdict::kDrop;
      e.reason = kReasonMissingScore;
      return;
    }
  }
  for (const auto& name : required) {
    if (!(e.scores.at(name) >= threshold)) {
      e.verdict = Verdict::kDrop;
      e.reason = kReasonBelowThreshold;
      return;
    }
  }
  e.verdict = Verdict::kKeep;
  e.reason.clear();
}

void CheckFilter(const std::vector<std::string>& required, double threshold) {
  if (required.empty()) throw Error(ErrorKind::kInvalidFilter, "no required scores");
  if (!std::isfinite(threshold)) throw Error(ErrorKind::kInvalidFilter, "threshold not finite");
}

}  // namespace

std::vector<ManifestEntry> ApplyFilter(const std::vector<ManifestEntry>& entries,
                                       const std::vector<std::string>& required_scores,
                                       double threshold) {
  FilterConfig cfg{required_scores, threshold, {}};
  return ApplyFilter(entries, cfg);
}

std::vector<ManifestEntry> ApplyFilter(const std::vector<ManifestEntry>& entries,
                                       const FilterConfig& cfg) {
  CheckFilter(cfg.required_scores, cfg.threshold);
  std::vector<ManifestEntry> out = entries;
  for (auto& e : out) {
    if (!e.corpus.empty() && cfg.bypass_corpora.count(e.corpus)) {
      e.verdict = Verdict::kKeep;
      e.reason = kReasonBypass;
    } else {
      Judge(e, cfg.required_scores, cfg.threshold);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const CurationReport& r) {
  j = {{"kept", r.kept},
       {"dropped", r.dropped},
       {"uncurated", r.uncurated},
       {"kept_hours", r.kept_hours},
       {"drop_reasons", r.drop_reasons}};
}

void from_json(const nlohmann::json& j, CurationReport& r) {
  r.kept = j.at("kept").get<std::size_t>();
  r.dropped = j.at("dropped").get<std::size_t>();
  r.uncurated = j.value("uncurated", std::size_t{0});
  r.kept_hours = j.at("kept_hours").get<double>();
  r.drop_reasons = j.value("drop_reasons", std::map<std::string, std::size_t>());
}

CurationReport Summarize(const std::vector<ManifestEntry>& entries) {
  CurationReport r;
  double kept_s = 0.0;
  for (const auto& e : entries) {
    switch (e.verdict) {
      case Verdict::kKeep:
        ++r.kept;
        kept_s += e.duration_s;
        break;
      case Verdict::kDrop:
        ++r.dropped;
        ++r.drop_reasons[e.reason.empty() ? "unspecified" : e.reason];
        break;
      case Verdict::kUncurated:
        ++r.uncurated;
        break;
    }
  }
  r.kept_hours = kept_s / 3600.0;
  return r;
}

Scorer::Scorer(ScorerHook hook) : hook_(std::move(hook)) {
  if (!hook_.score_fn) throw Error(ErrorKind::kInvalidParameter, "scorer without a function");
}

std::map<std::string, double> Scorer::operator()(const AudioBuffer& x) {
  auto scores = hook_.score_fn(x);
  std::vector<std::string> keys;
  for (const auto& [k, v] : scores) keys.push_back(k);
  if (!seen_) {
    keys_ = std::move(keys);
    seen_ = true;
  } else if (keys != keys_) {
    throw Error(ErrorKind::kInvalidParameter, "scorer '" + hook_.name + "' changed its keys");
  }
  return scores;
}

void PreprocessorRegistry::Register(const std::string& name, Preprocessor hook) {
  if (hooks_.count(name)) throw Error(ErrorKind::kDuplicateHook, "preprocessor '" + name + "'");
  hooks_.emplace(name, std::move(hook));
}

std::vector<std::string> PreprocessorRegistry::Names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : hooks_) out.push_back(k);
  return out;
}

AudioBuffer PreprocessorRegistry::Apply(const std::vector<std::string>& stages,
                                        const AudioBuffer& x,
                                        std::vector<std::string>* notices) const {
  AudioBuffer y = x;
  for (const auto& name : stages) {
    const auto it = hooks_.find(name);
    if (it == hooks_.end()) {
      if (notices) notices->push_back("skip preprocessor '" + name + "': not registered");
      continue;
    }
    y = it->second(y);
  }
  return y;
}

}  // namespace fse::curation
