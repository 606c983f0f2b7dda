// src/nn/layers.cc

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

#include "fse/nn/layers.h"

#include <cmath>

#include "fse/error.h"

namespace fse::nn {

LinearLayer::LinearLayer(std::size_t in, std::size_t out, Initializer& init,
                         bool bias, bool zero_init) {
  weight_ = AddParameter("weight", zero_init ? init.Constant({out, in}, 0.0)
                                             : init.FanIn({out, in}, in));
  if (bias)
    bias_ = AddParameter("bias", zero_init ? init.Constant({out}, 0.0)
                                           : init.FanIn({out}, in));
}

Conv1dLayer::Conv1dLayer(std::size_t in, std::size_t out, std::size_t kernel,
                         Conv1dOptions opt, Initializer& init, bool bias)
    : opt_(opt) {
  const std::size_t fan_in = in / opt.groups * kernel;
  weight_ = AddParameter("weight", init.FanIn({out, in / opt.groups, kernel}, fan_in));
  if (bias) bias_ = AddParameter("bias", init.FanIn({out}, fan_in));
}

Conv2dLayer::Conv2dLayer(std::size_t in, std::size_t out, std::size_t kh,
                         std::size_t kw, Conv2dOptions opt, Initializer& init)
    : opt_(opt) {
  const std::size_t fan_in = in * kh * kw;
  weight_ = AddParameter("weight", init.FanIn({out, in, kh, kw}, fan_in));
  bias_ = AddParameter("bias", init.FanIn({out}, fan_in));
}

LayerNormLayer::LayerNormLayer(std::size_t dim, double eps) : eps_(eps) {
  gamma_ = AddParameter("gamma", Tensor::Full({dim}, 1.0));
  beta_ = AddParameter("beta", Tensor::Full({dim}, 0.0));
}

SelfAttention::SelfAttention(std::size_t dim, std::size_t heads,
                             Initializer& init)
    : dim_(dim), heads_(heads), qkv_(dim, 3 * dim, init), out_(dim, dim, init) {
  if (heads == 0 || dim % heads != 0)
    throw Error(ErrorKind::kConfigError, "attention dim must divide by heads");
  AddModule("qkv", qkv_);
  AddModule("out", out_);
}

Tensor SelfAttention::operator()(const Tensor& x) const {
  const std::size_t b = x.dim(0), t = x.dim(1), dh = dim_ / heads_;
  auto qkv = Permute(Reshape(qkv_(x), {b, t, 3, heads_, dh}), {2, 0, 3, 1, 4});
  auto part = [&](std::size_t i) {
    return Reshape(Slice(qkv, 0, i, 1), {b * heads_, t, dh});
  };
  auto scores = Scale(BatchMatMul(part(0), part(1), false, true),
                      1.0 / std::sqrt(static_cast<double>(dh)));
  auto ctx = BatchMatMul(Softmax(scores), part(2), false, false);
  ctx = Reshape(Permute(Reshape(ctx, {b, heads_, t, dh}), {0, 2, 1, 3}),
                {b, t, dim_});
  return out_(ctx);
}

TransformerLayer::TransformerLayer(std::size_t dim, std::size_t heads,
                                   std::size_t ffn, Initializer& init)
    : ln1_(dim), ln2_(dim), attn_(dim, heads, init), fc1_(dim, ffn, init),
      fc2_(ffn, dim, init) {
  AddModule("ln1", ln1_);
  AddModule("attn", attn_);
  AddModule("ln2", ln2_);
  AddModule("fc1", fc1_);
  AddModule("fc2", fc2_);
}

Tensor TransformerLayer::operator()(const Tensor& x) const {
  auto h = Add(x, attn_(ln1_(x)));
  return Add(h, fc2_(Gelu(fc1_(ln2_(h)))));
}

BiLstm::BiLstm(std::size_t in, std::size_t hidden, Initializer& init) {
  const std::size_t g = 4 * hidden;
  wf_ih_ = AddParameter("fwd.w_ih", init.FanIn({g, in}, hidden));
  wf_hh_ = AddParameter("fwd.w_hh", init.FanIn({g, hidden}, hidden));
  bf_ = AddParameter("fwd.b", init.FanIn({g}, hidden));
  wb_ih_ = AddParameter("bwd.w_ih", init.FanIn({g, in}, hidden));
  wb_hh_ = AddParameter("bwd.w_hh", init.FanIn({g, hidden}, hidden));
  bb_ = AddParameter("bwd.b", init.FanIn({g}, hidden));
}

Tensor BiLstm::operator()(const Tensor& x) const {
  return Concat({Lstm(x, wf_ih_, wf_hh_, bf_, false),
                 Lstm(x, wb_ih_, wb_hh_, bb_, true)},
                2);
}

namespace {
Conv1dOptions Depthwise(std::size_t dim) {
  Conv1dOptions o;
  o.pad_left = o.pad_right = 3;
  o.groups = dim;
  return o;
}
}  // namespace

ConvNeXtBlock::ConvNeXtBlock(std::size_t dim, std::size_t intermediate,
                             double layer_scale, Initializer& init)
    : dwconv_(dim, dim, 7, Depthwise(dim), init), norm_(dim),
      pw1_(dim, intermediate, init), pw2_(intermediate, dim, init) {
  AddModule("dwconv", dwconv_);
  AddModule("norm", norm_);
  AddModule("pw1", pw1_);
  AddModule("pw2", pw2_);
  scale_ = AddParameter("scale", Tensor::Full({dim}, layer_scale));
}

Tensor ConvNeXtBlock::operator()(const Tensor& x) const {
  const std::size_t t = x.dim(0), d = x.dim(1);
  auto h = Reshape(Permute(x, {1, 0}), {1, d, t});
  h = Permute(Reshape(dwconv_(h), {d, t}), {1, 0});
  h = pw2_(Gelu(pw1_(norm_(h))));
  return Add(x, Mul(h, scale_));
}

}  // namespace fse::nn
