// src/eval/eval.cc

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

#include "fse/eval/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "fse/error.h"

namespace fse::eval {

double SiSdr(const std::vector<double>& estimate, const std::vector<double>& reference) {
  if (estimate.size() != reference.size())
    throw Error(ErrorKind::kShapeMismatch, "si_sdr needs equal lengths");
  double dot = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    dot += estimate[i] * reference[i];
    rr += reference[i] * reference[i];
  }
  if (!(rr > 0.0)) throw Error(ErrorKind::kDegenerateInput, "si_sdr reference is zero");
  const double alpha = dot / rr;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double t = alpha * reference[i];
    const double e = t - estimate[i];
    num += t * t;
    den += e * e;
  }
  if (den == 0.0) return num > 0.0 ? kSiSdrCapDb : -kSiSdrCapDb;
  if (num == 0.0) return -kSiSdrCapDb;
  return std::clamp(10.0 * std::log10(num / den), -kSiSdrCapDb, kSiSdrCapDb);
}

double Lsd(const std::vector<double>& estimate, const std::vector<double>& reference,
           const StftConfig& cfg) {
  if (estimate.size() != reference.size())
    throw Error(ErrorKind::kShapeMismatch, "lsd needs equal lengths");
  const Spectrogram se = Stft(AudioBuffer(estimate, 16000), cfg);
  const Spectrogram sr = Stft(AudioBuffer(reference, 16000), cfg);
  const std::size_t bins = se.num_bins();
  double total = 0.0;
  for (std::size_t t = 0; t < se.frames; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double d = 20.0 * (std::log10(std::abs(se.at(t, k)) + kLsdEps) -
                               std::log10(std::abs(sr.at(t, k)) + kLsdEps));
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(bins));
  }
  return total / static_cast<double>(se.frames);
}

const std::vector<std::string>& TableMetricOrder() {
  static const std::vector<std::string> order = {"DNSMOS", "NISQA", "UTMOS", "SCOREQ", "PESQ",
                                                 "ESTOI",  "SBS",   "LPS",   "SpkSim", "si_sdr",
                                                 "lsd"};
  return order;
}

std::vector<std::string> MetricReport::Columns() const {
  std::set<std::string> present;
  for (const auto& [id, m] : per_utterance)
    for (const auto& [k, v] : m) present.insert(k);
  for (const auto& [k, v] : aggregate) present.insert(k);
  std::vector<std::string> cols;
  for (const auto& name : TableMetricOrder())
    if (present.erase(name)) cols.push_back(name);
  cols.insert(cols.end(), present.begin(), present.end());
  return cols;
}

std::string MetricReport::RenderTable() const {
  const auto cols = Columns();
  std::size_t id_w = 4;
  for (const auto& [id, m] : per_utterance) id_w = std::max(id_w, id.size());
  std::ostringstream os;
  char buf[64];
  auto cell = [&](const std::string& s, std::size_t w) {
    os << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  cell("id", id_w);
  for (const auto& c : cols) {
    os << "  ";
    cell(c, std::max<std::size_t>(c.size(), 9));
  }
  os << '\n';
  auto row = [&](const std::string& id, const std::map<std::string, double>& m) {
    cell(id, id_w);
    for (const auto& c : cols) {
      os << "  ";
      const auto it = m.find(c);
      if (it == m.end()) {
        cell("-", std::max<std::size_t>(c.size(), 9));
      } else {
        std::snprintf(buf, sizeof(buf), "%.4f", it->second);
        cell(buf, std::max<std::size_t>(c.size(), 9));
      }
    }
    os << '\n';
  };
  for (const auto& [id, m] : per_utterance) row(id, m);
  row("mean", aggregate);
  return os.str();
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [id, m] : r.per_utterance) rows.push_back({{"id", id}, {"metrics", m}});
  j = {{"per_utterance", rows},
       {"aggregate", r.aggregate},
       {"skipped", r.skipped},
       {"metadata", r.metadata}};
}

void from_json(const nlohmann::json& j, MetricReport& r) {
  r.per_utterance.clear();
  for (const auto& row : j.at("per_utterance"))
    r.per_utterance.emplace_back(row.at("id").get<std::string>(),
                                 row.at("metrics").get<std::map<std::string, double>>());
  r.aggregate = j.at("aggregate").get<std::map<std::string, double>>();
  r.skipped = j.value("skipped", std::vector<std::string>());
  r.metadata = j.value("metadata", nlohmann::json::object());
}

namespace {

struct Slot {
  std::optional<std::map<std::string, double>> metrics;
  std::string skip;
  std::exception_ptr error;
};

void Score(const EvalPair& p, const std::vector<curation::ScorerHook>& hooks,
           const EvalOptions& opt, Slot& slot) {
  if (p.enhanced.sample_rate != p.clean.sample_rate) {
    slot.skip = p.id + ": rate " + std::to_string(p.enhanced.sample_rate) + " vs " +
                std::to_string(p.clean.sample_rate);
    return;
  }
  if (p.enhanced.size() != p.clean.size()) {
    slot.skip = p.id + ": length " + std::to_string(p.enhanced.size()) + " vs " +
                std::to_string(p.clean.size());
    return;
  }
  std::map<std::string, double> m;
  m["si_sdr"] = SiSdr(p.enhanced.samples, p.clean.samples);
  m["lsd"] = Lsd(p.enhanced.samples, p.clean.samples, opt.lsd_stft);
  for (const auto& h : hooks)
    for (const auto& [k, v] : h.score_fn(p.enhanced)) m[k] = v;
  slot.metrics = std::move(m);
}

}  // namespace

MetricReport Evaluate(const std::vector<EvalPair>& pairs,
                      const std::vector<curation::ScorerHook>& hooks, const EvalOptions& opt) {
  std::vector<Slot> slots(pairs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, pairs.size()));
  auto run = [&](unsigned w) {
    for (std::size_t i = w; i < pairs.size(); i += workers) {
      try {
        Score(pairs[i], hooks, opt, slots[i]);
      } catch (...) {
        slots[i].error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  MetricReport r;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (slots[i].error) std::rethrow_exception(slots[i].error);
    if (!slots[i].metrics) {
      r.skipped.push_back(slots[i].skip);
      continue;
    }
    for (const auto& [k, v] : *slots[i].metrics) {
      sums[k].first += v;
      ++sums[k].second;
    }
    r.per_utterance.emplace_back(pairs[i].id, std::move(*slots[i].metrics));
  }
  for (const auto& [k, s] : sums) r.aggregate[k] = s.first / static_cast<double>(s.second);
  r.metadata["pairs"] = pairs.size();
  r.metadata["evaluated"] = r.per_utterance.size();
  return r;
}

}  // namespace fse::eval
