// tools/fse_cli.cc

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

// Command-line front end for the enhancement pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "fse/curation/curation.h"
#include "fse/dsp/wav.h"
#include "fse/error.h"
#include "fse/eval/eval.h"
#include "fse/nn/metrics_log.h"
#include "fse/pipeline/config.h"
#include "fse/pipeline/data.h"
#include "fse/pipeline/pipeline.h"
#include "fse/pipeline/size.h"

namespace fs = std::filesystem;
using namespace fse;

namespace {

pipeline::RunConfig LoadConfig(const std::string& path, bool full) {
  pipeline::RunConfig cfg;
  if (!path.empty()) {
    cfg = pipeline::LoadRunConfig(path);
  } else {
    cfg = full ? pipeline::RunConfig::FullSize() : pipeline::RunConfig::Toy();
    pipeline::ApplyEnvironment(cfg);
  }
  return cfg;
}

void WriteJson(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int RunTrain(const pipeline::RunConfig& cfg, const std::string& stage_name,
             const std::string& ckpt_dir) {
  const fs::path dir = ckpt_dir.empty() ? cfg.CheckpointDir() : fs::path(ckpt_dir);
  std::vector<pipeline::Stage> stages;
  if (stage_name == "all")
    stages.assign(pipeline::kAllStages.begin(), pipeline::kAllStages.end());
  else
    stages.push_back(pipeline::StageFromName(stage_name));
  auto store = pipeline::CheckpointStore::Load(dir);
  for (auto s : stages) {
    const auto name = pipeline::StageName(s);
    const auto r = pipeline::RunStage(s, cfg, store);
    fs::create_directories(dir);
    r.checkpoint.Save((dir / (name + ".ckpt")).string());
    r.log.Write((dir / (name + ".log")).string());
    store.ckpts[s] = r.checkpoint;
    std::printf("%-10s steps %ld  loss %.6g -> %.6g  hash %s\n", name.c_str(), r.steps_run,
                r.initial_loss, r.final_loss, r.checkpoint.Hash().c_str());
  }
  return 0;
}

std::vector<std::pair<fs::path, fs::path>> EnhanceJobs(const fs::path& in, const fs::path& out) {
  std::vector<std::pair<fs::path, fs::path>> jobs;
  if (fs::is_directory(in)) {
    fs::create_directories(out);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(in))
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) jobs.emplace_back(f, out / f.filename());
  } else {
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    jobs.emplace_back(in, out);
  }
  return jobs;
}

int RunEnhance(const std::string& ckpt_dir, const std::string& in, const std::string& out,
               bool parallel) {
  const auto store = pipeline::CheckpointStore::Load(ckpt_dir);
  const pipeline::Enhancer enh{pipeline::PipelineCheckpointSet(store)};
  for (const auto& [src, dst] : EnhanceJobs(in, out)) {
    const auto x = ReadWav(src);
    const auto y = enh.Enhance(x, {.parallel = parallel, .probe = {}});
    WriteWav(dst, y, WavFormat::kFloat32);
    std::printf("%s -> %s (%zu samples at %d Hz)\n", src.string().c_str(), dst.string().c_str(),
                y.size(), y.sample_rate);
  }
  return 0;
}

int RunEval(const std::string& pairs_path, const std::string& out, unsigned threads) {
  std::ifstream f(pairs_path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + pairs_path);
  const fs::path base = fs::path(pairs_path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path q(p);
    return q.is_relative() ? base / q : q;
  };
  std::vector<eval::EvalPair> pairs;
  for (std::string line; std::getline(f, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    pairs.push_back({j.at("id").get<std::string>(),
                     ReadWav(resolve(j.at("enhanced").get<std::string>())),
                     ReadWav(resolve(j.at("clean").get<std::string>()))});
  }
  auto report = eval::Evaluate(pairs, {}, {.lsd_stft = {1024, 256}, .threads = threads});
  report.metadata["pairs_file"] = pairs_path;
  for (const auto& s : report.skipped) std::fprintf(stderr, "skipped %s\n", s.c_str());
  std::cout << report.RenderTable();
  if (!out.empty()) WriteJson(out, report);
  return 0;
}

int RunReport(const std::vector<std::string>& logs) {
  for (const auto& path : logs) {
    const auto log = nn::MetricsLog::Read(path);
    std::vector<std::string> keys;
    std::size_t records = 0;
    for (const auto& line : log.lines()) {
      const auto kv = nn::MetricsLog::ParseLine(line);
      if (kv.count("note")) continue;
      ++records;
      for (const auto& [k, v] : kv)
        if (k != "step" && std::find(keys.begin(), keys.end(), k) == keys.end())
          keys.push_back(k);
    }
    std::printf("%s  (%zu records)\n", path.c_str(), records);
    std::printf("  %-12s %14s %14s %14s\n", "metric", "first", "last", "best");
    for (const auto& k : keys) {
      const auto s = log.Series(k);
      if (s.empty()) continue;
      std::printf("  %-12s %14.6g %14.6g %14.6g\n", k.c_str(), s.front(), s.back(),
                  *std::min_element(s.begin(), s.end()));
    }
    for (const auto& line : log.lines()) {
      const auto kv = nn::MetricsLog::ParseLine(line);
      if (kv.count("note")) std::printf("  note: %s\n", kv.at("note").c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fse: generative-predictive speech enhancement toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  bool full = false;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "run config (JSON)");
    sub->add_flag("--full", full, "full-size preset when no config is given");
  };

  auto* init = app.add_subcommand("init-config", "write a preset run config");
  std::string init_out = "run.json";
  init->add_option("-o,--out", init_out, "output path");
  init->add_flag("--full", full, "full-size preset");

  auto* initc = app.add_subcommand("init-checkpoints", "write untrained checkpoints");
  add_config(initc);
  std::string initc_dir;
  initc->add_option("--ckpt-dir", initc_dir, "checkpoint directory");

  auto* sim = app.add_subcommand("simulate", "render degraded training pairs with sidecars");
  add_config(sim);
  std::string sim_out, sim_manifest, sim_noise;
  sim->add_option("-o,--out", sim_out, "output directory (default <cache_root>/simulated)");
  sim->add_option("--manifest", sim_manifest, "clean manifest (JSONL)");
  sim->add_option("--noise-dir", sim_noise, "noise WAV directory");

  auto* cur = app.add_subcommand("curate", "apply the quality gate to a manifest");
  std::string cur_in, cur_out, cur_report, cur_require = "ovrl,sig,bak,p808", cur_bypass = "ears";
  double cur_threshold = 3.0;
  cur->add_option("-i,--in", cur_in, "input manifest (JSONL)")->required();
  cur->add_option("-o,--out", cur_out, "filtered manifest (JSONL)")->required();
  cur->add_option("--report", cur_report, "curation report (JSON)");
  cur->add_option("--threshold", cur_threshold, "inclusive score threshold");
  cur->add_option("--require", cur_require, "comma-separated required scores");
  cur->add_option("--bypass", cur_bypass, "comma-separated corpora kept unfiltered");

  auto* train = app.add_subcommand("train", "train one stage, or all in dependency order");
  add_config(train);
  std::string stage = "all", train_dir;
  train->add_option("stage", stage, "encoder|adapter|vocoder|predictor|postnet|all")->required();
  train->add_option("--ckpt-dir", train_dir, "checkpoint directory");

  auto* enh = app.add_subcommand("enhance", "enhance a WAV file or directory");
  std::string enh_dir, enh_in, enh_out;
  bool enh_parallel = false;
  enh->add_option("--ckpt-dir", enh_dir, "checkpoint directory")->required();
  enh->add_option("-i,--in", enh_in, "input WAV or directory")->required();
  enh->add_option("-o,--out", enh_out, "output WAV or directory")->required();
  enh->add_flag("--parallel", enh_parallel, "run the two branches concurrently");

  auto* ev = app.add_subcommand("eval", "score enhanced/clean pairs");
  std::string ev_pairs, ev_out;
  unsigned ev_threads = 1;
  ev->add_option("--pairs", ev_pairs, "JSONL with id, enhanced, clean")->required();
  ev->add_option("-o,--out", ev_out, "report (JSON)");
  ev->add_option("--threads", ev_threads, "worker threads");

  auto* rep = app.add_subcommand("report", "summarize training logs");
  std::vector<std::string> rep_logs;
  rep->add_option("logs", rep_logs, "metrics log files")->required();

  auto* size = app.add_subcommand("size", "parameter and MAC totals");
  add_config(size);

  CLI11_PARSE(app, argc, argv);

  try {
    if (init->parsed()) {
      const auto cfg = full ? pipeline::RunConfig::FullSize() : pipeline::RunConfig::Toy();
      pipeline::SaveRunConfig(init_out, cfg);
      std::printf("wrote %s\n", init_out.c_str());
    } else if (initc->parsed()) {
      const auto cfg = LoadConfig(config_path, full);
      const fs::path dir = initc_dir.empty() ? cfg.CheckpointDir() : fs::path(initc_dir);
      pipeline::InitialCheckpoints(cfg).Save(dir);
      std::printf("wrote untrained checkpoints to %s\n", dir.string().c_str());
    } else if (sim->parsed()) {
      auto cfg = LoadConfig(config_path, full);
      if (!sim_manifest.empty()) cfg.data.clean_manifest = sim_manifest;
      if (!sim_noise.empty()) cfg.data.noise_dir = sim_noise;
      const fs::path out =
          sim_out.empty() ? fs::path(cfg.cache_root) / "simulated" : fs::path(sim_out);
      const auto pairs = pipeline::Simulate(cfg.data, out);
      std::printf("wrote %zu pairs to %s (data hash %s)\n", pairs.size(), out.string().c_str(),
                  pipeline::DataHash(pairs).c_str());
    } else if (cur->parsed()) {
      curation::FilterConfig fc;
      fc.required_scores = SplitCsv(cur_require);
      fc.threshold = cur_threshold;
      const auto bypass = SplitCsv(cur_bypass);
      fc.bypass_corpora = {bypass.begin(), bypass.end()};
      const auto out = curation::ApplyFilter(curation::ReadManifest(cur_in), fc);
      curation::WriteManifest(cur_out, out);
      const auto report = curation::Summarize(out);
      if (!cur_report.empty()) WriteJson(cur_report, report);
      std::cout << nlohmann::json(report).dump(2) << '\n';
    } else if (train->parsed()) {
      return RunTrain(LoadConfig(config_path, full), stage, train_dir);
    } else if (enh->parsed()) {
      return RunEnhance(enh_dir, enh_in, enh_out, enh_parallel);
    } else if (ev->parsed()) {
      return RunEval(ev_pairs, ev_out, ev_threads);
    } else if (rep->parsed()) {
      return RunReport(rep_logs);
    } else if (size->parsed()) {
      const auto cfg = LoadConfig(config_path, full);
      std::cout << (cfg.full_size ? "full-size" : "toy") << " configuration\n"
                << pipeline::CountParamsAndMacs(cfg).Render(true);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
