// src/nn/tensor.cc

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

#include "fse/nn/tensor.h"

#include <numeric>
#include <unordered_set>

#include "fse/error.h"

namespace fse::nn {
namespace {

thread_local bool g_grad_enabled = true;
thread_local std::uint64_t g_macs = 0;

}  // namespace

std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string ShapeString(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::Zeros(Shape shape) { return Full(std::move(shape), 0.0); }

Tensor Tensor::Full(Shape shape, double value) {
  auto n = std::make_shared<Node>();
  n->data.assign(NumElements(shape), value);
  n->shape = std::move(shape);
  return Tensor(std::move(n));
}

Tensor Tensor::FromData(Shape shape, const std::vector<double>& data) {
  return FromData(std::move(shape), Buffer(data.begin(), data.end()));
}

Tensor Tensor::FromData(Shape shape, Buffer data) {
  if (NumElements(shape) != data.size())
    throw Error(ErrorKind::kShapeMismatch,
                "tensor data size does not match " + ShapeString(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  return Tensor(std::move(n));
}

Tensor Tensor::Scalar(double v) { return FromData({}, Buffer{v}); }

Tensor Tensor::Parameter(Shape shape, Buffer data) {
  Tensor t = FromData(std::move(shape), std::move(data));
  t.node_->requires_grad = true;
  return t;
}

double Tensor::item() const {
  if (numel() != 1)
    throw Error(ErrorKind::kShapeMismatch, "item() on non-scalar tensor");
  return node_->data[0];
}

Tensor Tensor::Detach() const { return FromData(shape(), node_->data); }

void Tensor::Backward() {
  if (numel() != 1)
    throw Error(ErrorKind::kShapeMismatch, "Backward() needs a scalar");
  const double one = 1.0;
  Backward(std::span<const double>(&one, 1));
}

void Tensor::Backward(std::span<const double> seed) {
  if (seed.size() != numel())
    throw Error(ErrorKind::kShapeMismatch, "backward seed size");
  if (!node_->requires_grad) return;

  // Iterative post-order DFS; graphs from recurrent layers get deep.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->inputs.size()) {
      Node* child = n->inputs[next++].get();
      if (child->requires_grad && !child->inputs.empty() &&
          visited.insert(child).second)
        stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(n);
    stack.pop_back();
  }

  node_->EnsureGrad();
  for (std::size_t i = 0; i < seed.size(); ++i) node_->grad[i] += seed[i];
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
  for (Node* n : order) {
    n->backward = nullptr;
    n->inputs.clear();
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool GradEnabled() { return g_grad_enabled; }

Tensor MakeResult(Shape shape, Buffer data,
                  std::vector<Tensor> inputs,
                  std::function<void(Node&)> backward) {
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->data = std::move(data);
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& t : inputs) any = any || t.requires_grad();
    if (any) {
      n->requires_grad = true;
      n->inputs.reserve(inputs.size());
      for (auto& t : inputs) n->inputs.push_back(t.node());
      n->backward = std::move(backward);
    }
  }
  return Tensor(std::move(n));
}

void MacCounter::Add(std::uint64_t macs) { g_macs += macs; }
std::uint64_t MacCounter::Get() { return g_macs; }
void MacCounter::Reset() { g_macs = 0; }

}  // namespace fse::nn
