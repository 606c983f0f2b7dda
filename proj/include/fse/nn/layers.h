// include/fse/nn/layers.h

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

#ifndef FSE_NN_LAYERS_H_
#define FSE_NN_LAYERS_H_

#include <memory>
#include <vector>

#include "fse/nn/module.h"
#include "fse/nn/ops.h"

namespace fse::nn {

class LinearLayer : public Module {
 public:
  LinearLayer(std::size_t in, std::size_t out, Initializer& init,
              bool bias = true, bool zero_init = false);
  Tensor operator()(const Tensor& x) const { return Linear(x, weight_, bias_); }
  std::size_t in_features() const { return weight_.dim(1); }
  std::size_t out_features() const { return weight_.dim(0); }

 private:
  Tensor weight_, bias_;
};

class Conv1dLayer : public Module {
 public:
  Conv1dLayer(std::size_t in, std::size_t out, std::size_t kernel,
              Conv1dOptions opt, Initializer& init, bool bias = true);
  Tensor operator()(const Tensor& x) const {
    return Conv1d(x, weight_, bias_, opt_);
  }

 private:
  Conv1dOptions opt_;
  Tensor weight_, bias_;
};

class Conv2dLayer : public Module {
 public:
  Conv2dLayer(std::size_t in, std::size_t out, std::size_t kh, std::size_t kw,
              Conv2dOptions opt, Initializer& init);
  Tensor operator()(const Tensor& x) const {
    return Conv2d(x, weight_, bias_, opt_);
  }

 private:
  Conv2dOptions opt_;
  Tensor weight_, bias_;
};

/// Normalizes over the last axis with learnable affine parameters.
class LayerNormLayer : public Module {
 public:
  explicit LayerNormLayer(std::size_t dim, double eps = 1e-5);
  Tensor operator()(const Tensor& x) const {
    return LayerNorm(x, gamma_, beta_, eps_);
  }

 private:
  double eps_;
  Tensor gamma_, beta_;
};

/// Multi-head self-attention over x [B, T, D].
class SelfAttention : public Module {
 public:
  SelfAttention(std::size_t dim, std::size_t heads, Initializer& init);
  Tensor operator()(const Tensor& x) const;

 private:
  std::size_t dim_, heads_;
  LinearLayer qkv_, out_;
};

/// Pre-norm Transformer encoder layer over x [B, T, D].
class TransformerLayer : public Module {
 public:
  TransformerLayer(std::size_t dim, std::size_t heads, std::size_t ffn,
                   Initializer& init);
  Tensor operator()(const Tensor& x) const;

 private:
  LayerNormLayer ln1_, ln2_;
  SelfAttention attn_;
  LinearLayer fc1_, fc2_;
};

/// Bidirectional LSTM over axis 1 of x [B, L, In]; returns [B, L, 2H].
class BiLstm : public Module {
 public:
  BiLstm(std::size_t in, std::size_t hidden, Initializer& init);
  Tensor operator()(const Tensor& x) const;

 private:
  Tensor wf_ih_, wf_hh_, bf_, wb_ih_, wb_hh_, bb_;
};

/// ConvNeXt-1D block over x [T, D]: depthwise conv (k=7), LayerNorm,
/// pointwise expansion, GELU, projection, layer scale, residual.
class ConvNeXtBlock : public Module {
 public:
  ConvNeXtBlock(std::size_t dim, std::size_t intermediate, double layer_scale,
                Initializer& init);
  Tensor operator()(const Tensor& x) const;

 private:
  Conv1dLayer dwconv_;
  LayerNormLayer norm_;
  LinearLayer pw1_, pw2_;
  Tensor scale_;
};

}  // namespace fse::nn

#endif  // FSE_NN_LAYERS_H_
