// src/pipeline/size.cc

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

#include "fse/pipeline/size.h"

#include <cstdio>
#include <sstream>

#include "fse/dsp/stft.h"
#include "fse/error.h"

namespace fse::pipeline {
namespace macs {

std::uint64_t Linear(std::uint64_t rows, std::uint64_t in, std::uint64_t out) {
  return rows * in * out;
}

std::uint64_t Conv1d(std::uint64_t in_ch, std::uint64_t out_ch, std::uint64_t kernel,
                     std::uint64_t t_out, std::uint64_t groups) {
  return out_ch * t_out * (in_ch / groups) * kernel;
}

std::uint64_t Lstm(std::uint64_t batch, std::uint64_t len, std::uint64_t in,
                   std::uint64_t hidden) {
  return batch * len * 4 * hidden * (in + hidden);
}

std::uint64_t AttentionCore(std::uint64_t batch, std::uint64_t len, std::uint64_t dim) {
  return 2 * batch * len * len * dim;
}

std::uint64_t Encoder(const encoder::EncoderConfig& c, std::uint64_t n16) {
  const std::uint64_t f = (n16 + c.frame_hop - 1) / c.frame_hop;
  const std::uint64_t d = c.d_model;
  std::uint64_t total = 0, t = f * c.frame_hop, in = 1;
  for (std::size_t s : c.conv_strides) {
    t /= s;
    total += Conv1d(in, c.conv_channels, s, t);
    in = c.conv_channels;
  }
  total += Linear(f, c.conv_channels, d);
  total += Conv1d(d, d, c.pos_conv_kernel, f, d);
  const std::uint64_t per_layer = Linear(f, d, 3 * d) +
                                  AttentionCore(c.n_heads, f, d / c.n_heads) +
                                  Linear(f, d, d) + Linear(f, d, c.ffn_dim) +
                                  Linear(f, c.ffn_dim, d);
  return total + c.n_transformer_layers * per_layer;
}

std::uint64_t Backbone(const gen::BackboneConfig& c, std::uint64_t frames) {
  const std::uint64_t h = c.hidden_dim;
  std::uint64_t total = Conv1d(c.input_dim, h, 7, frames);
  const std::uint64_t per_block = Conv1d(h, h, 7, frames, h) +
                                  Linear(frames, h, c.intermediate_dim) +
                                  Linear(frames, c.intermediate_dim, h);
  return total + c.n_blocks * per_block;
}

std::uint64_t Adapter(const gen::BackboneConfig& c, std::uint64_t frames) {
  return Backbone(c, frames) + Linear(frames, c.hidden_dim, c.input_dim);
}

std::uint64_t Vocoder(const gen::BackboneConfig& c, std::uint64_t frames) {
  const std::uint64_t bins = c.istft_cfg ? c.istft_cfg->num_bins() : 0;
  return Backbone(c, frames) + Linear(frames, c.hidden_dim, 3 * bins);
}

std::uint64_t DualPathCore(std::uint64_t frames, std::uint64_t bins, std::uint64_t in,
                           std::uint64_t out, const predictor::PredictorConfig& c) {
  const std::uint64_t d = c.emb_dim, h = c.lstm_hidden, rows = frames * bins;
  const std::uint64_t per_block =
      2 * Lstm(frames, bins, d, h) + Linear(rows, 2 * h, d) +  // intra-frequency
      2 * Lstm(bins, frames, d, h) + Linear(rows, 2 * h, d) +  // inter-time
      4 * Linear(rows, d, d) + AttentionCore(c.attn_heads, frames, bins * (d / c.attn_heads));
  return Linear(rows, in, d) + c.n_blocks * per_block + Linear(rows, d, out);
}

std::uint64_t Predictor(const predictor::PredictorConfig& c, std::uint64_t n16) {
  const std::uint64_t t = dsp::FrameCount(n16, c.stft);
  return DualPathCore(t, c.stft.num_bins(), 2, 2, c);
}

std::uint64_t PostNet(const postnet::PostNetConfig& c, std::uint64_t n16) {
  const std::uint64_t n48 = n16 * (c.out_rate / c.in_rate);
  const std::uint64_t t = dsp::FrameCount(n48, c.core.stft);
  const std::uint64_t k = c.n_subbands;
  return DualPathCore(t, c.core.stft.num_bins() / k, 4 * k, 2 * k, c.core);
}

}  // namespace macs

std::uint64_t SizeReport::total_params() const {
  std::uint64_t s = 0;
  for (const auto& c : components) s += c.params;
  return s;
}

std::uint64_t SizeReport::total_macs() const {
  std::uint64_t s = 0;
  for (const auto& c : components) s += c.macs;
  return s;
}

std::string SizeReport::Render(bool with_reference) const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %16s %14s %12s\n", "component", "params", "M params",
                "GMACs/s");
  os << line;
  auto row = [&](const std::string& name, std::uint64_t p, std::uint64_t m) {
    std::snprintf(line, sizeof(line), "%-12s %16llu %14.2f %12.3f\n", name.c_str(),
                  static_cast<unsigned long long>(p), p / 1e6, m / 1e9);
    os << line;
  };
  for (const auto& c : components) row(c.name, c.params, c.macs);
  row("total", total_params(), total_macs());
  if (with_reference) {
    std::snprintf(line, sizeof(line), "%-12s %16s %14.2f %12.2f  (published, comparison only)\n",
                  "reference", "-", kReferenceParams / 1e6, kReferenceGmacs);
    os << line;
  }
  os << "MACs: conv, linear, attention and LSTM cells for 1 s of 16 kHz input;\n"
        "post-network layers at 48 kHz; norms, activations, FFTs, resampling and\n"
        "discriminators excluded.\n";
  return os.str();
}

namespace {

template <typename M, typename... Args>
std::uint64_t ParamsOf(Args&&... args) {
  const M m(std::forward<Args>(args)...);
  std::uint64_t n = 0;
  for (const auto& [name, t] : m.NamedParameters()) n += t.numel();
  return n;
}

}  // namespace

SizeReport CountParamsAndMacs(const RunConfig& cfg) {
  cfg.Validate();
  const std::uint64_t n16 = 16000;
  const std::uint64_t frames = (n16 + cfg.encoder.frame_hop - 1) / cfg.encoder.frame_hop;
  SizeReport r;
  r.components.push_back({"encoder", ParamsOf<encoder::Encoder>(cfg.encoder),
                          macs::Encoder(cfg.encoder, n16)});
  r.components.push_back({"adapter", ParamsOf<gen::Adapter>(cfg.adapter.model),
                          macs::Adapter(cfg.adapter.model, frames)});
  r.components.push_back({"vocoder", ParamsOf<gen::Vocoder>(cfg.vocoder.model),
                          macs::Vocoder(cfg.vocoder.model, frames)});
  r.components.push_back({"predictor", ParamsOf<predictor::Predictor>(cfg.predictor),
                          macs::Predictor(cfg.predictor, n16)});
  r.components.push_back({"postnet", ParamsOf<postnet::PostNet>(cfg.postnet.model),
                          macs::PostNet(cfg.postnet.model, n16)});
  return r;
}

}  // namespace fse::pipeline
