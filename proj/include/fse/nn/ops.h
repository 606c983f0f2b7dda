// include/fse/nn/ops.h

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

#ifndef FSE_NN_OPS_H_
#define FSE_NN_OPS_H_

#include <vector>

#include "fse/dsp/stft.h"
#include "fse/nn/tensor.h"

namespace fse::nn {

// Binary ops. `b` must have the shape of `a`, a trailing suffix of it, or be
// a scalar; it is broadcast over the leading axes of `a`.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
// Same-shape only.
Tensor Div(const Tensor& a, const Tensor& b);

Tensor Scale(const Tensor& a, double s);
Tensor AddScalar(const Tensor& a, double s);

Tensor Gelu(const Tensor& a);  // exact (erf) form
Tensor Tanh(const Tensor& a);
Tensor Sigmoid(const Tensor& a);
Tensor Exp(const Tensor& a);
Tensor Log(const Tensor& a);
Tensor Abs(const Tensor& a);
Tensor Square(const Tensor& a);
Tensor Sqrt(const Tensor& a);
Tensor LeakyRelu(const Tensor& a, double slope);

Tensor Sum(const Tensor& a);
Tensor Mean(const Tensor& a);

Tensor Reshape(const Tensor& a, Shape shape);
Tensor Permute(const Tensor& a, const std::vector<std::size_t>& dims);
Tensor Slice(const Tensor& a, std::size_t axis, std::size_t start,
             std::size_t length);
Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis);

enum class PadMode { kZero, kReflect };
/// Pads the last axis.
Tensor Pad(const Tensor& a, std::size_t left, std::size_t right, PadMode mode);

/// y = x W^T + b over the last axis; w is [out, in], b is [out] or undefined.
Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b);

/// Batched product of [B, m, k] and [B, k, n] (either operand optionally
/// stored transposed in its last two axes).
Tensor BatchMatMul(const Tensor& a, const Tensor& b, bool transpose_a,
                   bool transpose_b);

Tensor Softmax(const Tensor& a);  // last axis

/// Normalises the last axis; gamma/beta may be undefined.
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps = 1e-5);

struct Conv1dOptions {
  std::size_t stride = 1;
  std::size_t pad_left = 0;
  std::size_t pad_right = 0;
  std::size_t dilation = 1;
  std::size_t groups = 1;
};
/// x [B, Cin, T], w [Cout, Cin/groups, K], b [Cout] or undefined.
Tensor Conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv1dOptions& opt);

struct Conv2dOptions {
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t pad_h = 0, pad_w = 0;
};
/// x [B, Cin, H, W], w [Cout, Cin, KH, KW], b [Cout] or undefined.
Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv2dOptions& opt);

/// Single-direction LSTM over axis 1 of x [B, L, In]; gate order i, f, g, o.
/// w_ih [4H, In], w_hh [4H, H], b [4H]. Returns hidden states [B, L, H].
Tensor Lstm(const Tensor& x, const Tensor& w_ih, const Tensor& w_hh,
            const Tensor& b, bool reverse);

/// Rows t of x [T, D] with flags[t] set are replaced by emb [D].
Tensor RowSubstitute(const Tensor& x, const std::vector<bool>& flags,
                     const Tensor& emb);

/// Differentiable STFT of x [N]; returns [frames, bins, 2] (re, im).
Tensor StftOp(const Tensor& x, const StftConfig& cfg);

/// Differentiable weighted overlap-add inverse of s [frames, bins, 2],
/// trimmed or zero-padded to `length` samples.
Tensor IstftOp(const Tensor& s, const StftConfig& cfg, std::size_t length);

Tensor MseLoss(const Tensor& a, const Tensor& b);
Tensor L1Loss(const Tensor& a, const Tensor& b);

}  // namespace fse::nn

#endif  // FSE_NN_OPS_H_
