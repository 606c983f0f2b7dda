// src/nn/ops.cc

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

#include "fse/nn/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fse/dsp/fft.h"
#include "fse/error.h"

namespace fse::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

void Require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorKind::kShapeMismatch, what);
}

// Number of times `b` repeats inside `a` under suffix broadcasting.
std::size_t BroadcastRepeats(const Tensor& a, const Tensor& b,
                             const char* op) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (b.numel() == 1) return a.numel();
  bool ok = sb.size() <= sa.size();
  for (std::size_t i = 0; ok && i < sb.size(); ++i)
    ok = sb[sb.size() - 1 - i] == sa[sa.size() - 1 - i];
  Require(ok, std::string(op) + ": cannot broadcast " + ShapeString(sb) +
                  " onto " + ShapeString(sa));
  return a.numel() / b.numel();
}

template <typename Fwd, typename Da, typename Db>
Tensor Binary(const Tensor& a, const Tensor& b, const char* name, Fwd f,
              Da da, Db db) {
  BroadcastRepeats(a, b, name);
  const std::size_t n = a.numel(), m = b.numel();
  Buffer out(n);
  const auto& x = a.values();
  const auto& y = b.values();
  for (std::size_t i = 0; i < n; ++i) out[i] = f(x[i], y[i % m]);
  return MakeResult(a.shape(), std::move(out), {a, b},
                    [na = a.node(), nb = b.node(), n, m, da, db](Node& self) {
                      if (na->requires_grad) {
                        na->EnsureGrad();
                        for (std::size_t i = 0; i < n; ++i)
                          na->grad[i] += self.grad[i] *
                                         da(na->data[i], nb->data[i % m]);
                      }
                      if (nb->requires_grad) {
                        nb->EnsureGrad();
                        for (std::size_t i = 0; i < n; ++i)
                          nb->grad[i % m] += self.grad[i] *
                                             db(na->data[i], nb->data[i % m]);
                      }
                    });
}

// dfn(x, y) is the derivative given input x and output y.
template <typename Fn, typename DFn>
Tensor Unary(const Tensor& a, Fn fn, DFn dfn) {
  const auto& x = a.values();
  Buffer out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i]);
  return MakeResult(a.shape(), std::move(out), {a},
                    [na = a.node(), dfn](Node& self) {
                      na->EnsureGrad();
                      for (std::size_t i = 0; i < self.data.size(); ++i)
                        na->grad[i] += self.grad[i] *
                                       dfn(na->data[i], self.data[i]);
                    });
}

std::vector<std::size_t> Strides(const Shape& s) {
  std::vector<std::size_t> st(s.size(), 1);
  for (std::size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i];
  return st;
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  return Binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor Div(const Tensor& a, const Tensor& b) {
  Require(a.shape() == b.shape(), "div: shapes differ");
  return Binary(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor Scale(const Tensor& a, double s) {
  return Unary(
      a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor AddScalar(const Tensor& a, double s) {
  return Unary(
      a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor Gelu(const Tensor& a) {
  return Unary(
      a,
      [](double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); },
      [](double x, double) {
        const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
        const double pdf =
            std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        return cdf + x * pdf;
      });
}

Tensor Tanh(const Tensor& a) {
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Sigmoid(const Tensor& a) {
  return Unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Exp(const Tensor& a) {
  return Unary(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor Log(const Tensor& a) {
  return Unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor Abs(const Tensor& a) {
  return Unary(
      a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Tensor Square(const Tensor& a) {
  return Unary(
      a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Tensor Sqrt(const Tensor& a) {
  return Unary(
      a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor LeakyRelu(const Tensor& a, double slope) {
  return Unary(
      a, [slope](double x) { return x >= 0 ? x : slope * x; },
      [slope](double x, double) { return x >= 0 ? 1.0 : slope; });
}

Tensor Sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return MakeResult({}, {s}, {a}, [na = a.node()](Node& self) {
    na->EnsureGrad();
    for (double& g : na->grad) g += self.grad[0];
  });
}

Tensor Mean(const Tensor& a) {
  Require(a.numel() > 0, "mean of empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor Reshape(const Tensor& a, Shape shape) {
  Require(NumElements(shape) == a.numel(),
          "reshape " + ShapeString(a.shape()) + " -> " + ShapeString(shape));
  return MakeResult(std::move(shape), a.values(), {a},
                    [na = a.node()](Node& self) {
                      na->EnsureGrad();
                      for (std::size_t i = 0; i < self.grad.size(); ++i)
                        na->grad[i] += self.grad[i];
                    });
}

Tensor Permute(const Tensor& a, const std::vector<std::size_t>& dims) {
  const Shape& in = a.shape();
  Require(dims.size() == in.size(), "permute: rank mismatch");
  Shape out_shape(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) out_shape[i] = in.at(dims[i]);
  const auto in_strides = Strides(in);
  // Stride in the input for a unit step along each output axis.
  std::vector<std::size_t> step(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) step[i] = in_strides[dims[i]];

  const std::size_t n = a.numel();
  std::vector<std::size_t> src(n);
  std::vector<std::size_t> idx(dims.size(), 0);
  std::size_t offset = 0;
  for (std::size_t o = 0; o < n; ++o) {
    src[o] = offset;
    for (std::size_t ax = dims.size(); ax-- > 0;) {
      ++idx[ax];
      offset += step[ax];
      if (idx[ax] < out_shape[ax]) break;
      offset -= step[ax] * idx[ax];
      idx[ax] = 0;
    }
  }
  const auto& x = a.values();
  Buffer out(n);
  for (std::size_t o = 0; o < n; ++o) out[o] = x[src[o]];
  return MakeResult(std::move(out_shape), std::move(out), {a},
                    [na = a.node(), src = std::move(src)](Node& self) {
                      na->EnsureGrad();
                      for (std::size_t o = 0; o < src.size(); ++o)
                        na->grad[src[o]] += self.grad[o];
                    });
}

Tensor Slice(const Tensor& a, std::size_t axis, std::size_t start,
             std::size_t length) {
  const Shape& s = a.shape();
  Require(axis < s.size() && start + length <= s[axis], "slice out of range");
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  Shape out_shape = s;
  out_shape[axis] = length;
  const std::size_t span_in = s[axis] * inner, span_out = length * inner;
  const auto& x = a.values();
  Buffer out(outer * span_out);
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(x.begin() + o * span_in + start * inner, span_out,
                out.begin() + o * span_out);
  return MakeResult(std::move(out_shape), std::move(out), {a},
                    [na = a.node(), outer, span_in, span_out,
                     off = start * inner](Node& self) {
                      na->EnsureGrad();
                      for (std::size_t o = 0; o < outer; ++o)
                        for (std::size_t j = 0; j < span_out; ++j)
                          na->grad[o * span_in + off + j] +=
                              self.grad[o * span_out + j];
                    });
}

Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis) {
  Require(!parts.empty(), "concat of nothing");
  const Shape& s0 = parts[0].shape();
  Require(axis < s0.size(), "concat axis");
  std::size_t outer = 1, inner = 1, total = 0;
  for (std::size_t i = 0; i < axis; ++i) outer *= s0[i];
  for (std::size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];
  for (const auto& p : parts) {
    Shape a = p.shape(), b = s0;
    Require(a.size() == b.size(), "concat rank");
    a[axis] = b[axis] = 0;
    Require(a == b, "concat: shapes differ off-axis");
    total += p.shape()[axis];
  }
  Shape out_shape = s0;
  out_shape[axis] = total;
  Buffer out(outer * total * inner);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.shape()[axis] * inner;
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(p.values().begin() + o * w, w,
                  out.begin() + o * total * inner + offset);
    offset += w;
  }
  std::vector<std::shared_ptr<Node>> nodes;
  for (const auto& p : parts) nodes.push_back(p.node());
  return MakeResult(std::move(out_shape), std::move(out), parts,
                    [nodes, outer, total, inner, axis](Node& self) {
                      std::size_t offset = 0;
                      for (const auto& n : nodes) {
                        const std::size_t w = n->shape[axis] * inner;
                        if (n->requires_grad) {
                          n->EnsureGrad();
                          for (std::size_t o = 0; o < outer; ++o)
                            for (std::size_t j = 0; j < w; ++j)
                              n->grad[o * w + j] +=
                                  self.grad[o * total * inner + offset + j];
                        }
                        offset += w;
                      }
                    });
}

Tensor Pad(const Tensor& a, std::size_t left, std::size_t right, PadMode mode) {
  const Shape& s = a.shape();
  Require(!s.empty(), "pad of scalar");
  const std::size_t len = s.back();
  Require(len > 0, "pad of empty axis");
  const std::size_t rows = a.numel() / len;
  const std::size_t out_len = len + left + right;
  // Source index per output position (or npos for zero padding).
  std::vector<std::size_t> src(out_len);
  for (std::size_t j = 0; j < out_len; ++j) {
    const auto i = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(left);
    if (i >= 0 && i < static_cast<std::ptrdiff_t>(len)) src[j] = static_cast<std::size_t>(i);
    else if (mode == PadMode::kZero) src[j] = static_cast<std::size_t>(-1);
    else src[j] = dsp::ReflectIndex(i, len);
  }
  Shape out_shape = s;
  out_shape.back() = out_len;
  const auto& x = a.values();
  Buffer out(rows * out_len, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < out_len; ++j)
      if (src[j] != static_cast<std::size_t>(-1))
        out[r * out_len + j] = x[r * len + src[j]];
  return MakeResult(std::move(out_shape), std::move(out), {a},
                    [na = a.node(), src, rows, len, out_len](Node& self) {
                      na->EnsureGrad();
                      for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t j = 0; j < out_len; ++j)
                          if (src[j] != static_cast<std::size_t>(-1))
                            na->grad[r * len + src[j]] +=
                                self.grad[r * out_len + j];
                    });
}

Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Require(w.rank() == 2, "linear: weight must be 2-D");
  const std::size_t out_f = w.dim(0), in_f = w.dim(1);
  Require(x.rank() >= 1 && x.shape().back() == in_f,
          "linear: input " + ShapeString(x.shape()) + " vs weight " +
              ShapeString(w.shape()));
  if (b.defined()) Require(b.numel() == out_f, "linear: bias size");
  const std::size_t rows = x.numel() / in_f;
  Shape out_shape = x.shape();
  out_shape.back() = out_f;
  Buffer out(rows * out_f);
  {
    CMapMat X(x.values().data(), rows, in_f);
    CMapMat W(w.values().data(), out_f, in_f);
    MapMat Y(out.data(), rows, out_f);
    Y.noalias() = X * W.transpose();
    if (b.defined()) {
      Eigen::Map<const Eigen::RowVectorXd> B(b.values().data(), out_f);
      Y.rowwise() += B;
    }
  }
  MacCounter::Add(rows * in_f * out_f);
  std::vector<Tensor> inputs{x, w};
  if (b.defined()) inputs.push_back(b);
  return MakeResult(
      std::move(out_shape), std::move(out), inputs,
      [nx = x.node(), nw = w.node(), nb = b.defined() ? b.node() : nullptr,
       rows, in_f, out_f](Node& self) {
        CMapMat G(self.grad.data(), rows, out_f);
        if (nx->requires_grad) {
          nx->EnsureGrad();
          MapMat(nx->grad.data(), rows, in_f).noalias() +=
              G * CMapMat(nw->data.data(), out_f, in_f);
        }
        if (nw->requires_grad) {
          nw->EnsureGrad();
          MapMat(nw->grad.data(), out_f, in_f).noalias() +=
              G.transpose() * CMapMat(nx->data.data(), rows, in_f);
        }
        if (nb && nb->requires_grad) {
          nb->EnsureGrad();
          Eigen::Map<Eigen::RowVectorXd>(nb->grad.data(), out_f) +=
              G.colwise().sum();
        }
      });
}

Tensor BatchMatMul(const Tensor& a, const Tensor& b, bool ta, bool tb) {
  Require(a.rank() == 3 && b.rank() == 3 && a.dim(0) == b.dim(0),
          "bmm: need [B, ., .] operands");
  const std::size_t batch = a.dim(0);
  const std::size_t m = ta ? a.dim(2) : a.dim(1);
  const std::size_t k = ta ? a.dim(1) : a.dim(2);
  const std::size_t kb = tb ? b.dim(2) : b.dim(1);
  const std::size_t n = tb ? b.dim(1) : b.dim(2);
  Require(k == kb, "bmm: inner dimensions differ");
  const std::size_t ar = a.dim(1), ac = a.dim(2), br = b.dim(1), bc = b.dim(2);
  Buffer out(batch * m * n);
  for (std::size_t i = 0; i < batch; ++i) {
    CMapMat A(a.values().data() + i * ar * ac, ar, ac);
    CMapMat B(b.values().data() + i * br * bc, br, bc);
    MapMat C(out.data() + i * m * n, m, n);
    if (!ta && !tb) C.noalias() = A * B;
    else if (!ta && tb) C.noalias() = A * B.transpose();
    else if (ta && !tb) C.noalias() = A.transpose() * B;
    else C.noalias() = A.transpose() * B.transpose();
  }
  MacCounter::Add(batch * m * n * k);
  return MakeResult(
      {batch, m, n}, std::move(out), {a, b},
      [na = a.node(), nb = b.node(), batch, m, n, ar, ac, br, bc, ta,
       tb](Node& self) {
        for (std::size_t i = 0; i < batch; ++i) {
          CMapMat G(self.grad.data() + i * m * n, m, n);
          CMapMat A(na->data.data() + i * ar * ac, ar, ac);
          CMapMat B(nb->data.data() + i * br * bc, br, bc);
          if (na->requires_grad) {
            na->EnsureGrad();
            MapMat dA(na->grad.data() + i * ar * ac, ar, ac);
            // d op(A) = G op(B)^T
            if (!ta && !tb) dA.noalias() += G * B.transpose();
            else if (!ta && tb) dA.noalias() += G * B;
            else if (ta && !tb) dA.noalias() += B * G.transpose();
            else dA.noalias() += B.transpose() * G.transpose();
          }
          if (nb->requires_grad) {
            nb->EnsureGrad();
            MapMat dB(nb->grad.data() + i * br * bc, br, bc);
            // d op(B) = op(A)^T G
            if (!ta && !tb) dB.noalias() += A.transpose() * G;
            else if (!ta && tb) dB.noalias() += G.transpose() * A;
            else if (ta && !tb) dB.noalias() += A * G;
            else dB.noalias() += G.transpose() * A.transpose();
          }
        }
      });
}

Tensor Softmax(const Tensor& a) {
  const std::size_t d = a.shape().back();
  const std::size_t rows = a.numel() / d;
  const auto& x = a.values();
  Buffer out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data() + r * d;
    double* yr = out.data() + r * d;
    const double mx = *std::max_element(xr, xr + d);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (yr[j] = std::exp(xr[j] - mx));
    for (std::size_t j = 0; j < d; ++j) yr[j] /= s;
  }
  return MakeResult(a.shape(), std::move(out), {a},
                    [na = a.node(), rows, d](Node& self) {
                      na->EnsureGrad();
                      for (std::size_t r = 0; r < rows; ++r) {
                        const double* y = self.data.data() + r * d;
                        const double* g = self.grad.data() + r * d;
                        double dot = 0.0;
                        for (std::size_t j = 0; j < d; ++j) dot += y[j] * g[j];
                        for (std::size_t j = 0; j < d; ++j)
                          na->grad[r * d + j] += y[j] * (g[j] - dot);
                      }
                    });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                 double eps) {
  const std::size_t d = x.shape().back();
  const std::size_t rows = x.numel() / d;
  if (gamma.defined()) Require(gamma.numel() == d, "layernorm gamma size");
  if (beta.defined()) Require(beta.numel() == d, "layernorm beta size");
  const auto& in = x.values();
  Buffer xhat(in.size()), out(in.size()), inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = in.data() + r * d;
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= d;
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= d;
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (xr[j] - mean) * inv_std[r];
      xhat[r * d + j] = h;
      double y = h;
      if (gamma.defined()) y *= gamma.values()[j];
      if (beta.defined()) y += beta.values()[j];
      out[r * d + j] = y;
    }
  }
  std::vector<Tensor> inputs{x};
  if (gamma.defined()) inputs.push_back(gamma);
  if (beta.defined()) inputs.push_back(beta);
  return MakeResult(
      x.shape(), std::move(out), inputs,
      [nx = x.node(), ng = gamma.defined() ? gamma.node() : nullptr,
       nb = beta.defined() ? beta.node() : nullptr, xhat = std::move(xhat),
       inv_std = std::move(inv_std), rows, d](Node& self) {
        if (ng && ng->requires_grad) ng->EnsureGrad();
        if (nb && nb->requires_grad) nb->EnsureGrad();
        if (nx->requires_grad) nx->EnsureGrad();
        Buffer dh(d);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* g = self.grad.data() + r * d;
          const double* h = xhat.data() + r * d;
          double mean_dh = 0.0, mean_dh_h = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            if (ng && ng->requires_grad) ng->grad[j] += g[j] * h[j];
            if (nb && nb->requires_grad) nb->grad[j] += g[j];
            dh[j] = ng ? g[j] * ng->data[j] : g[j];
            mean_dh += dh[j];
            mean_dh_h += dh[j] * h[j];
          }
          if (!nx->requires_grad) continue;
          mean_dh /= d;
          mean_dh_h /= d;
          for (std::size_t j = 0; j < d; ++j)
            nx->grad[r * d + j] +=
                inv_std[r] * (dh[j] - mean_dh - h[j] * mean_dh_h);
        }
      });
}

Tensor Conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv1dOptions& opt) {
  Require(x.rank() == 3 && w.rank() == 3, "conv1d: x [B,C,T], w [O,C/g,K]");
  const std::size_t batch = x.dim(0), cin = x.dim(1), t_in = x.dim(2);
  const std::size_t cout = w.dim(0), cin_g = w.dim(1), k = w.dim(2);
  const std::size_t g = opt.groups;
  Require(g > 0 && cin % g == 0 && cout % g == 0 && cin / g == cin_g,
          "conv1d: channel/group mismatch " + ShapeString(x.shape()) + " " +
              ShapeString(w.shape()));
  if (b.defined()) Require(b.numel() == cout, "conv1d bias");
  const std::size_t span = opt.dilation * (k - 1) + 1;
  const std::size_t padded = t_in + opt.pad_left + opt.pad_right;
  Require(padded >= span && opt.stride > 0, "conv1d: input shorter than kernel");
  const std::size_t t_out = (padded - span) / opt.stride + 1;
  const std::size_t cout_g = cout / g;
  const std::size_t rows = cin_g * k;

  // Column-index table shared by forward and backward: input time for each
  // (tap, output step), or npos in the padding.
  constexpr auto kNone = static_cast<std::size_t>(-1);
  auto tidx_ptr = std::make_shared<std::vector<std::size_t>>(k * t_out);
  auto& tidx = *tidx_ptr;
  for (std::size_t kk = 0; kk < k; ++kk)
    for (std::size_t t = 0; t < t_out; ++t) {
      const auto pos = static_cast<std::ptrdiff_t>(t * opt.stride + kk * opt.dilation) -
                       static_cast<std::ptrdiff_t>(opt.pad_left);
      tidx[kk * t_out + t] =
          pos >= 0 && pos < static_cast<std::ptrdiff_t>(t_in) ? static_cast<std::size_t>(pos) : kNone;
    }

  auto im2col = [=](const double* xb, std::size_t grp, double* cols) {
    const auto& tidx = *tidx_ptr;
    for (std::size_t c = 0; c < cin_g; ++c) {
      const double* xc = xb + (grp * cin_g + c) * t_in;
      for (std::size_t kk = 0; kk < k; ++kk) {
        double* row = cols + (c * k + kk) * t_out;
        const std::size_t* ti = tidx.data() + kk * t_out;
        for (std::size_t t = 0; t < t_out; ++t)
          row[t] = ti[t] == kNone ? 0.0 : xc[ti[t]];
      }
    }
  };

  Buffer out(batch * cout * t_out, 0.0);
  Buffer cols(rows * t_out);
  const auto& xv = x.values();
  const auto& wv = w.values();
  for (std::size_t bi = 0; bi < batch; ++bi) {
    const double* xb = xv.data() + bi * cin * t_in;
    for (std::size_t grp = 0; grp < g; ++grp) {
      im2col(xb, grp, cols.data());
      CMapMat W(wv.data() + grp * cout_g * rows, cout_g, rows);
      MapMat Y(out.data() + (bi * cout + grp * cout_g) * t_out, cout_g, t_out);
      Y.noalias() = W * CMapMat(cols.data(), rows, t_out);
    }
    if (b.defined())
      for (std::size_t o = 0; o < cout; ++o)
        for (std::size_t t = 0; t < t_out; ++t)
          out[(bi * cout + o) * t_out + t] += b.values()[o];
  }
  MacCounter::Add(batch * cout * t_out * rows);

  std::vector<Tensor> inputs{x, w};
  if (b.defined()) inputs.push_back(b);
  return MakeResult(
      {batch, cout, t_out}, std::move(out), inputs,
      [nx = x.node(), nw = w.node(), nb = b.defined() ? b.node() : nullptr,
       batch, cin, t_in, cout, cout_g, rows, t_out, g, k, cin_g,
       tidx_ptr, im2col](Node& self) {
        const auto& tidx = *tidx_ptr;
        Buffer cols(rows * t_out), dcols(rows * t_out);
        if (nx->requires_grad) nx->EnsureGrad();
        if (nw->requires_grad) nw->EnsureGrad();
        for (std::size_t bi = 0; bi < batch; ++bi) {
          const double* xb = nx->data.data() + bi * cin * t_in;
          for (std::size_t grp = 0; grp < g; ++grp) {
            CMapMat G(self.grad.data() + (bi * cout + grp * cout_g) * t_out,
                      cout_g, t_out);
            if (nw->requires_grad) {
              im2col(xb, grp, cols.data());
              MapMat(nw->grad.data() + grp * cout_g * rows, cout_g, rows)
                  .noalias() += G * CMapMat(cols.data(), rows, t_out).transpose();
            }
            if (nx->requires_grad) {
              MapMat D(dcols.data(), rows, t_out);
              D.noalias() =
                  CMapMat(nw->data.data() + grp * cout_g * rows, cout_g, rows)
                      .transpose() * G;
              for (std::size_t c = 0; c < cin_g; ++c) {
                double* gx = nx->grad.data() + (bi * cin + grp * cin_g + c) * t_in;
                for (std::size_t kk = 0; kk < k; ++kk) {
                  const double* row = dcols.data() + (c * k + kk) * t_out;
                  const std::size_t* ti = tidx.data() + kk * t_out;
                  for (std::size_t t = 0; t < t_out; ++t)
                    if (ti[t] != static_cast<std::size_t>(-1)) gx[ti[t]] += row[t];
                }
              }
            }
          }
          if (nb && nb->requires_grad) {
            nb->EnsureGrad();
            for (std::size_t o = 0; o < cout; ++o)
              for (std::size_t t = 0; t < t_out; ++t)
                nb->grad[o] += self.grad[(bi * cout + o) * t_out + t];
          }
        }
      });
}

Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv2dOptions& opt) {
  Require(x.rank() == 4 && w.rank() == 4 && x.dim(1) == w.dim(1),
          "conv2d: x [B,C,H,W], w [O,C,KH,KW]");
  const std::size_t batch = x.dim(0), cin = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (b.defined()) Require(b.numel() == cout, "conv2d bias");
  Require(h + 2 * opt.pad_h >= kh && wd + 2 * opt.pad_w >= kw,
          "conv2d: input smaller than kernel");
  const std::size_t ho = (h + 2 * opt.pad_h - kh) / opt.stride_h + 1;
  const std::size_t wo = (wd + 2 * opt.pad_w - kw) / opt.stride_w + 1;
  const std::size_t rows = cin * kh * kw, ncol = ho * wo;

  auto im2col = [=](const double* xb, double* cols) {
    for (std::size_t c = 0; c < cin; ++c)
      for (std::size_t i = 0; i < kh; ++i)
        for (std::size_t j = 0; j < kw; ++j) {
          double* row = cols + ((c * kh + i) * kw + j) * ncol;
          for (std::size_t y = 0; y < ho; ++y) {
            const auto yy = static_cast<std::ptrdiff_t>(y * opt.stride_h + i) -
                            static_cast<std::ptrdiff_t>(opt.pad_h);
            for (std::size_t z = 0; z < wo; ++z) {
              const auto zz = static_cast<std::ptrdiff_t>(z * opt.stride_w + j) -
                              static_cast<std::ptrdiff_t>(opt.pad_w);
              const bool in = yy >= 0 && yy < static_cast<std::ptrdiff_t>(h) &&
                              zz >= 0 && zz < static_cast<std::ptrdiff_t>(wd);
              row[y * wo + z] = in ? xb[(c * h + yy) * wd + zz] : 0.0;
            }
          }
        }
  };
  auto col2im = [=](const double* cols, double* gx) {
    for (std::size_t c = 0; c < cin; ++c)
      for (std::size_t i = 0; i < kh; ++i)
        for (std::size_t j = 0; j < kw; ++j) {
          const double* row = cols + ((c * kh + i) * kw + j) * ncol;
          for (std::size_t y = 0; y < ho; ++y) {
            const auto yy = static_cast<std::ptrdiff_t>(y * opt.stride_h + i) -
                            static_cast<std::ptrdiff_t>(opt.pad_h);
            if (yy < 0 || yy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t z = 0; z < wo; ++z) {
              const auto zz = static_cast<std::ptrdiff_t>(z * opt.stride_w + j) -
                              static_cast<std::ptrdiff_t>(opt.pad_w);
              if (zz < 0 || zz >= static_cast<std::ptrdiff_t>(wd)) continue;
              gx[(c * h + yy) * wd + zz] += row[y * wo + z];
            }
          }
        }
  };

  Buffer out(batch * cout * ncol);
  Buffer cols(rows * ncol);
  for (std::size_t bi = 0; bi < batch; ++bi) {
    im2col(x.values().data() + bi * cin * h * wd, cols.data());
    MapMat Y(out.data() + bi * cout * ncol, cout, ncol);
    Y.noalias() = CMapMat(w.values().data(), cout, rows) *
                  CMapMat(cols.data(), rows, ncol);
    if (b.defined())
      for (std::size_t o = 0; o < cout; ++o) Y.row(o).array() += b.values()[o];
  }
  MacCounter::Add(batch * cout * ncol * rows);

  std::vector<Tensor> inputs{x, w};
  if (b.defined()) inputs.push_back(b);
  return MakeResult(
      {batch, cout, ho, wo}, std::move(out), inputs,
      [nx = x.node(), nw = w.node(), nb = b.defined() ? b.node() : nullptr,
       batch, cin, h, wd, cout, rows, ncol, im2col, col2im](Node& self) {
        Buffer cols(rows * ncol);
        if (nx->requires_grad) nx->EnsureGrad();
        if (nw->requires_grad) nw->EnsureGrad();
        for (std::size_t bi = 0; bi < batch; ++bi) {
          CMapMat G(self.grad.data() + bi * cout * ncol, cout, ncol);
          if (nw->requires_grad) {
            im2col(nx->data.data() + bi * cin * h * wd, cols.data());
            MapMat(nw->grad.data(), cout, rows).noalias() +=
                G * CMapMat(cols.data(), rows, ncol).transpose();
          }
          if (nx->requires_grad) {
            MapMat(cols.data(), rows, ncol).noalias() =
                CMapMat(nw->data.data(), cout, rows).transpose() * G;
            col2im(cols.data(), nx->grad.data() + bi * cin * h * wd);
          }
          if (nb && nb->requires_grad) {
            nb->EnsureGrad();
            for (std::size_t o = 0; o < cout; ++o) nb->grad[o] += G.row(o).sum();
          }
        }
      });
}

Tensor Lstm(const Tensor& x, const Tensor& w_ih, const Tensor& w_hh,
            const Tensor& b, bool reverse) {
  Require(x.rank() == 3, "lstm: x must be [B, L, In]");
  const std::size_t batch = x.dim(0), len = x.dim(1), in_f = x.dim(2);
  const std::size_t hid = w_hh.dim(1);
  Require(w_ih.rank() == 2 && w_ih.dim(0) == 4 * hid && w_ih.dim(1) == in_f &&
              w_hh.dim(0) == 4 * hid && b.numel() == 4 * hid,
          "lstm: weight shapes");
  const std::size_t g4 = 4 * hid;

  // Input projections for every step at once: [B*L, 4H].
  Buffer xw(batch * len * g4);
  {
    MapMat XW(xw.data(), batch * len, g4);
    XW.noalias() = CMapMat(x.values().data(), batch * len, in_f) *
                   CMapMat(w_ih.values().data(), g4, in_f).transpose();
    XW.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.values().data(), g4);
  }
  MacCounter::Add(batch * len * g4 * (in_f + hid));

  const bool record = GradEnabled() && (x.requires_grad() || w_ih.requires_grad() ||
                                        w_hh.requires_grad() || b.requires_grad());
  // Activated gates (i, f, g, o) and cell state per step, kept for BPTT.
  Buffer gates(record ? batch * len * g4 : 0);
  Buffer cells(record ? batch * len * hid : 0);
  Buffer out(batch * len * hid);
  RowMat h = RowMat::Zero(batch, hid), c = RowMat::Zero(batch, hid);
  RowMat pre(batch, g4);
  CMapMat Whh(w_hh.values().data(), g4, hid);
  auto sigm = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  for (std::size_t s = 0; s < len; ++s) {
    const std::size_t t = reverse ? len - 1 - s : s;
    pre.noalias() = h * Whh.transpose();
    for (std::size_t bi = 0; bi < batch; ++bi) {
      const double* xr = xw.data() + (bi * len + t) * g4;
      for (std::size_t j = 0; j < hid; ++j) {
        const double gi = sigm(pre(bi, j) + xr[j]);
        const double gf = sigm(pre(bi, hid + j) + xr[hid + j]);
        const double gg = std::tanh(pre(bi, 2 * hid + j) + xr[2 * hid + j]);
        const double go = sigm(pre(bi, 3 * hid + j) + xr[3 * hid + j]);
        const double cn = gf * c(bi, j) + gi * gg;
        c(bi, j) = cn;
        h(bi, j) = go * std::tanh(cn);
        out[(bi * len + t) * hid + j] = h(bi, j);
        if (record) {
          double* gr = gates.data() + (bi * len + t) * g4;
          gr[j] = gi;
          gr[hid + j] = gf;
          gr[2 * hid + j] = gg;
          gr[3 * hid + j] = go;
          cells[(bi * len + t) * hid + j] = cn;
        }
      }
    }
  }
  if (!record) return Tensor::FromData({batch, len, hid}, std::move(out));

  return MakeResult(
      {batch, len, hid}, std::move(out), {x, w_ih, w_hh, b},
      [nx = x.node(), nwi = w_ih.node(), nwh = w_hh.node(), nb = b.node(),
       gates = std::move(gates), cells = std::move(cells), batch, len, in_f,
       hid, g4, reverse](Node& self) {
        Buffer dxw(batch * len * g4, 0.0);
        RowMat dh_next = RowMat::Zero(batch, hid), dc_next = RowMat::Zero(batch, hid);
        RowMat dgate(batch, g4), h_prev(batch, hid);
        CMapMat Whh(nwh->data.data(), g4, hid);
        const bool need_whh = nwh->requires_grad;
        if (need_whh) nwh->EnsureGrad();
        for (std::size_t s = len; s-- > 0;) {
          const std::size_t t = reverse ? len - 1 - s : s;
          const bool first = s == 0;
          const std::size_t tp = reverse ? t + 1 : t - 1;  // previous step
          for (std::size_t bi = 0; bi < batch; ++bi) {
            const double* gr = gates.data() + (bi * len + t) * g4;
            const double* cr = cells.data() + (bi * len + t) * hid;
            const double* cp = first ? nullptr : cells.data() + (bi * len + tp) * hid;
            const double* gp = first ? nullptr : gates.data() + (bi * len + tp) * g4;
            for (std::size_t j = 0; j < hid; ++j) {
              const double gi = gr[j], gf = gr[hid + j], gg = gr[2 * hid + j],
                           go = gr[3 * hid + j];
              const double tc = std::tanh(cr[j]);
              const double dh = self.grad[(bi * len + t) * hid + j] + dh_next(bi, j);
              const double dc = dc_next(bi, j) + dh * go * (1.0 - tc * tc);
              const double c_prev = first ? 0.0 : cp[j];
              dgate(bi, j) = dc * gg * gi * (1.0 - gi);
              dgate(bi, hid + j) = dc * c_prev * gf * (1.0 - gf);
              dgate(bi, 2 * hid + j) = dc * gi * (1.0 - gg * gg);
              dgate(bi, 3 * hid + j) = dh * tc * go * (1.0 - go);
              dc_next(bi, j) = dc * gf;
              h_prev(bi, j) = first ? 0.0 : gp[3 * hid + j] * std::tanh(cp[j]);
            }
            std::copy_n(dgate.data() + bi * g4, g4, dxw.data() + (bi * len + t) * g4);
          }
          dh_next.noalias() = dgate * Whh;
          if (need_whh)
            MapMat(nwh->grad.data(), g4, hid).noalias() += dgate.transpose() * h_prev;
        }
        CMapMat DXW(dxw.data(), batch * len, g4);
        if (nx->requires_grad) {
          nx->EnsureGrad();
          MapMat(nx->grad.data(), batch * len, in_f).noalias() +=
              DXW * CMapMat(nwi->data.data(), g4, in_f);
        }
        if (nwi->requires_grad) {
          nwi->EnsureGrad();
          MapMat(nwi->grad.data(), g4, in_f).noalias() +=
              DXW.transpose() * CMapMat(nx->data.data(), batch * len, in_f);
        }
        if (nb->requires_grad) {
          nb->EnsureGrad();
          Eigen::Map<Eigen::RowVectorXd>(nb->grad.data(), g4) += DXW.colwise().sum();
        }
      });
}

Tensor RowSubstitute(const Tensor& x, const std::vector<bool>& flags,
                     const Tensor& emb) {
  Require(x.rank() == 2 && x.dim(0) == flags.size() && emb.numel() == x.dim(1),
          "row substitute: x [T, D], flags [T], emb [D]");
  const std::size_t rows = x.dim(0), d = x.dim(1);
  Buffer out = x.values();
  for (std::size_t t = 0; t < rows; ++t)
    if (flags[t]) std::copy_n(emb.values().begin(), d, out.begin() + t * d);
  return MakeResult(x.shape(), std::move(out), {x, emb},
                    [nx = x.node(), ne = emb.node(), flags, rows, d](Node& self) {
                      if (nx->requires_grad) nx->EnsureGrad();
                      if (ne->requires_grad) ne->EnsureGrad();
                      for (std::size_t t = 0; t < rows; ++t)
                        for (std::size_t j = 0; j < d; ++j) {
                          const double g = self.grad[t * d + j];
                          if (flags[t]) {
                            if (ne->requires_grad) ne->grad[j] += g;
                          } else if (nx->requires_grad) {
                            nx->grad[t * d + j] += g;
                          }
                        }
                    });
}

Tensor StftOp(const Tensor& x, const StftConfig& cfg) {
  cfg.Validate();
  Require(x.rank() == 1 && x.numel() > 0, "stft op: x must be a non-empty [N]");
  std::size_t frames = 0;
  const auto spec = dsp::StftRaw(x.values(), cfg, &frames);
  const std::size_t nb = cfg.num_bins();
  Buffer out(frames * nb * 2);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out[2 * i] = spec[i].real();
    out[2 * i + 1] = spec[i].imag();
  }
  return MakeResult(
      {frames, nb, 2}, std::move(out), {x},
      [nx = x.node(), cfg, frames, nb](Node& self) {
        nx->EnsureGrad();
        const auto n = static_cast<std::size_t>(cfg.fft_size);
        const auto len = nx->data.size();
        const auto window = dsp::HannWindow(cfg.fft_size);
        std::vector<std::complex<double>> z(nb);
        Buffer gframe(n);
        for (std::size_t t = 0; t < frames; ++t) {
          // Adjoint of the real DFT, expressed through the inverse real DFT.
          for (std::size_t k = 0; k < nb; ++k) {
            const std::complex<double> g(self.grad[(t * nb + k) * 2],
                                         self.grad[(t * nb + k) * 2 + 1]);
            const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
            z[k] = g * (edge ? static_cast<double>(n) : n / 2.0);
          }
          dsp::Irfft(z, gframe);
          const std::ptrdiff_t start = dsp::FrameStart(t, cfg);
          for (std::size_t j = 0; j < n; ++j) {
            const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(j);
            const std::size_t src =
                idx >= 0 && idx < static_cast<std::ptrdiff_t>(len)
                    ? static_cast<std::size_t>(idx)
                    : dsp::ReflectIndex(idx, len);
            nx->grad[src] += gframe[j] * window[j];
          }
        }
      });
}

Tensor IstftOp(const Tensor& s, const StftConfig& cfg, std::size_t length) {
  cfg.Validate();
  const std::size_t nb = cfg.num_bins();
  Require(s.rank() == 3 && s.dim(1) == nb && s.dim(2) == 2,
          "istft op: expected [frames, " + std::to_string(nb) + ", 2], got " +
              ShapeString(s.shape()));
  const std::size_t frames = s.dim(0);
  std::vector<std::complex<double>> spec(frames * nb);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] = {s.values()[2 * i], s.values()[2 * i + 1]};
  const std::size_t full = dsp::IstftLength(frames, cfg);
  const std::size_t valid = std::min(length, full);
  const auto raw = dsp::IstftRaw(spec, frames, cfg, valid);
  Buffer out(raw.begin(), raw.end());
  out.resize(length, 0.0);
  return MakeResult(
      {length}, std::move(out), {s},
      [ns = s.node(), cfg, frames, nb, valid](Node& self) {
        ns->EnsureGrad();
        const auto n = static_cast<std::size_t>(cfg.fft_size);
        const auto window = dsp::HannWindow(cfg.fft_size);
        const auto env = dsp::WindowSquareEnvelope(frames, cfg, valid);
        Buffer gframe(n);
        std::vector<std::complex<double>> z(nb);
        for (std::size_t t = 0; t < frames; ++t) {
          const std::ptrdiff_t start = dsp::FrameStart(t, cfg);
          for (std::size_t j = 0; j < n; ++j) {
            const std::ptrdiff_t p = start + static_cast<std::ptrdiff_t>(j);
            const bool in = p >= 0 && p < static_cast<std::ptrdiff_t>(valid) &&
                            env[p] > 1e-11;
            gframe[j] = in ? window[j] * self.grad[p] / env[p] : 0.0;
          }
          // Adjoint of the inverse real DFT.
          dsp::Rfft(gframe, z);
          for (std::size_t k = 0; k < nb; ++k) {
            const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
            const double c = (edge ? 1.0 : 2.0) / static_cast<double>(n);
            ns->grad[(t * nb + k) * 2] += c * z[k].real();
            if (!edge) ns->grad[(t * nb + k) * 2 + 1] += c * z[k].imag();
          }
        }
      });
}

Tensor MseLoss(const Tensor& a, const Tensor& b) {
  Require(a.shape() == b.shape(), "mse: shapes differ " + ShapeString(a.shape()) +
                                      " vs " + ShapeString(b.shape()));
  return Mean(Square(Sub(a, b)));
}

Tensor L1Loss(const Tensor& a, const Tensor& b) {
  Require(a.shape() == b.shape(), "l1: shapes differ " + ShapeString(a.shape()) +
                                      " vs " + ShapeString(b.shape()));
  return Mean(Abs(Sub(a, b)));
}

}  // namespace fse::nn
