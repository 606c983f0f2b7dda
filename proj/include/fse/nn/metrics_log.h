// include/fse/nn/metrics_log.h

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

#ifndef FSE_NN_METRICS_LOG_H_
#define FSE_NN_METRICS_LOG_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fse::nn {

/// Step-indexed training log. Each record is one text line of
/// space-separated key=value pairs, starting with step=N.
class MetricsLog {
 public:
  using Record = std::vector<std::pair<std::string, double>>;

  void Add(long step, const Record& values);
  /// Free-form notice, written as `note=<text>` with the current step.
  void Note(long step, const std::string& text);

  const std::vector<std::string>& lines() const { return lines_; }
  /// Last value logged under `key`, or NaN when absent.
  double Last(const std::string& key) const;
  /// All values logged under `key` in order.
  std::vector<double> Series(const std::string& key) const;

  void Write(const std::string& path) const;
  static MetricsLog Read(const std::string& path);
  /// Splits one line into key/value strings.
  static std::map<std::string, std::string> ParseLine(const std::string& line);

 private:
  std::vector<std::string> lines_;
};

}  // namespace fse::nn

#endif  // FSE_NN_METRICS_LOG_H_
