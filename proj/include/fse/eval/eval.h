// include/fse/eval/eval.h

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

#ifndef FSE_EVAL_EVAL_H_
#define FSE_EVAL_EVAL_H_

#include <map>
#include <string>
#include <vector>

#include "fse/curation/curation.h"
#include "fse/dsp/audio.h"
#include "fse/dsp/stft.h"
#include "json.hpp"

namespace fse::eval {

inline constexpr double kSiSdrCapDb = 100.0;
inline constexpr double kLsdEps = 1e-12;

/// Scale-invariant SDR in dB, clamped to [-100, 100].
/// Errors: ShapeMismatch on unequal lengths; DegenerateInput for a zero or
/// empty reference.
double SiSdr(const std::vector<double>& estimate, const std::vector<double>& reference);

/// Log-spectral distance in dB: frame mean of the RMS log-magnitude
/// difference over bins. Errors: ShapeMismatch.
double Lsd(const std::vector<double>& estimate, const std::vector<double>& reference,
           const StftConfig& cfg);

/// Column order of the reference results table; hook metrics slot in by name.
const std::vector<std::string>& TableMetricOrder();

struct MetricReport {
  /// utterance id -> metric -> value, in evaluation order.
  std::vector<std::pair<std::string, std::map<std::string, double>>> per_utterance;
  std::map<std::string, double> aggregate;
  std::vector<std::string> skipped;
  nlohmann::json metadata = nlohmann::json::object();

  /// Metric names present in the report, table columns first.
  std::vector<std::string> Columns() const;
  /// Plain-text table with one row per utterance and a final mean row.
  std::string RenderTable() const;
};

void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);

struct EvalPair {
  std::string id;
  AudioBuffer enhanced;
  AudioBuffer clean;
};

struct EvalOptions {
  StftConfig lsd_stft{1024, 256};
  /// Worker threads for the per-pair map; aggregation order is fixed.
  unsigned threads = 1;
};

/// si_sdr, lsd and every hook metric per utterance, then arithmetic means.
/// Misaligned pairs (rate or length) are skipped and listed.
MetricReport Evaluate(const std::vector<EvalPair>& pairs,
                      const std::vector<curation::ScorerHook>& hooks = {},
                      const EvalOptions& opt = {});

}  // namespace fse::eval

#endif  // FSE_EVAL_EVAL_H_
