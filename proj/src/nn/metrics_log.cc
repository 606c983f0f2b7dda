// src/nn/metrics_log.cc

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

#include "fse/nn/metrics_log.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fse/error.h"

namespace fse::nn {

void MetricsLog::Add(long step, const Record& values) {
  std::ostringstream os;
  os.precision(10);
  os << "step=" << step;
  for (const auto& [k, v] : values) os << ' ' << k << '=' << v;
  lines_.push_back(os.str());
}

void MetricsLog::Note(long step, const std::string& text) {
  std::string t = text;
  for (char& c : t)
    if (c == ' ' || c == '=') c = '_';
  lines_.push_back("step=" + std::to_string(step) + " note=" + t);
}

std::map<std::string, std::string> MetricsLog::ParseLine(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

std::vector<double> MetricsLog::Series(const std::string& key) const {
  std::vector<double> out;
  for (const auto& l : lines_) {
    auto kv = ParseLine(l);
    auto it = kv.find(key);
    if (it != kv.end()) out.push_back(std::stod(it->second));
  }
  return out;
}

double MetricsLog::Last(const std::string& key) const {
  auto s = Series(key);
  return s.empty() ? std::numeric_limits<double>::quiet_NaN() : s.back();
}

void MetricsLog::Write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  for (const auto& l : lines_) f << l << '\n';
}

MetricsLog MetricsLog::Read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  MetricsLog log;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) log.lines_.push_back(line);
  return log;
}

}  // namespace fse::nn
