// include/fse/curation/curation.h

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

#ifndef FSE_CURATION_CURATION_H_
#define FSE_CURATION_CURATION_H_

#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fse/dsp/audio.h"
#include "json.hpp"

namespace fse::curation {

enum class Verdict { kKeep, kDrop, kUncurated };

std::string VerdictName(Verdict v);
/// Errors: InvalidParameter.
Verdict VerdictFromName(const std::string& name);

inline constexpr char kReasonMissingScore[] = "missing score";
inline constexpr char kReasonBelowThreshold[] = "below threshold";
inline constexpr char kReasonBypass[] = "corpus bypass";

struct ManifestEntry {
  std::string utterance_id;
  std::string path;
  int sample_rate = 16000;
  double duration_s = 0.0;
  std::map<std::string, double> scores;
  Verdict verdict = Verdict::kUncurated;
  /// Corpus tag; empty when unknown.
  std::string corpus;
  /// Why the verdict was reached; empty for uncurated entries.
  std::string reason;

  bool operator==(const ManifestEntry&) const = default;
};

void to_json(nlohmann::json& j, const ManifestEntry& e);
void from_json(const nlohmann::json& j, ManifestEntry& e);

/// Errors: InvalidParameter on a duplicate id or non-positive duration.
void ValidateManifest(const std::vector<ManifestEntry>& entries);

/// JSON Lines, one entry per line. Blank lines are ignored.
/// Errors: Io; InvalidParameter (see ValidateManifest).
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

struct FilterConfig {
  std::vector<std::string> required_scores = {"ovrl", "sig", "bak", "p808"};
  double threshold = 3.0;
  /// Corpora kept without looking at scores.
  std::set<std::string> bypass_corpora = {"ears"};

  bool operator==(const FilterConfig&) const = default;
};

void to_json(nlohmann::json& j, const FilterConfig& c);
void from_json(const nlohmann::json& j, FilterConfig& c);

/// Keep iff every required score is present and >= threshold. Order is
/// preserved and each entry's reason is filled in.
/// Errors: InvalidFilter on an empty required list or non-finite threshold.
std::vector<ManifestEntry> ApplyFilter(const std::vector<ManifestEntry>& entries,
                                       const std::vector<std::string>& required_scores,
                                       double threshold);
/// As above, with per-corpus bypass.
std::vector<ManifestEntry> ApplyFilter(const std::vector<ManifestEntry>& entries,
                                       const FilterConfig& cfg);

struct CurationReport {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::size_t uncurated = 0;
  double kept_hours = 0.0;
  std::map<std::string, std::size_t> drop_reasons;

  bool operator==(const CurationReport&) const = default;
};

void to_json(nlohmann::json& j, const CurationReport& r);
void from_json(const nlohmann::json& j, CurationReport& r);

CurationReport Summarize(const std::vector<ManifestEntry>& entries);

/// External quality scorer.
struct ScorerHook {
  std::string name;
  std::function<std::map<std::string, double>(const AudioBuffer&)> score_fn;
};

/// Wraps a hook and enforces a stable key set across calls.
class Scorer {
 public:
  explicit Scorer(ScorerHook hook);
  const std::string& name() const { return hook_.name; }
  /// Errors: InvalidParameter when the keys differ from the first call.
  std::map<std::string, double> operator()(const AudioBuffer& x);

 private:
  ScorerHook hook_;
  std::vector<std::string> keys_;
  bool seen_ = false;
};

using Preprocessor = std::function<AudioBuffer(const AudioBuffer&)>;

/// Named opaque cleaning stages.
class PreprocessorRegistry {
 public:
  /// Errors: DuplicateHook.
  void Register(const std::string& name, Preprocessor hook);
  bool Has(const std::string& name) const { return hooks_.count(name) > 0; }
  std::vector<std::string> Names() const;
  /// Runs the named stages in order. Unregistered names are skipped and a
  /// notice is appended to `notices`.
  AudioBuffer Apply(const std::vector<std::string>& stages, const AudioBuffer& x,
                    std::vector<std::string>* notices = nullptr) const;

 private:
  std::map<std::string, Preprocessor> hooks_;
};

}  // namespace fse::curation

#endif  // FSE_CURATION_CURATION_H_
