// src/nn/module.cc

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

#include "fse/nn/module.h"

#include <cmath>

#include "fse/error.h"

namespace fse::nn {

Tensor Initializer::Uniform(Shape shape, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Buffer v(NumElements(shape));
  for (double& x : v) x = dist(rng_);
  return Tensor::Parameter(std::move(shape), std::move(v));
}

Tensor Initializer::Normal(Shape shape, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Buffer v(NumElements(shape));
  for (double& x : v) x = dist(rng_);
  return Tensor::Parameter(std::move(shape), std::move(v));
}

Tensor Initializer::FanIn(Shape shape, std::size_t fan_in) {
  return Uniform(std::move(shape), 1.0 / std::sqrt(static_cast<double>(fan_in)));
}

Tensor Initializer::Constant(Shape shape, double value) {
  const std::size_t n = NumElements(shape);
  return Tensor::Parameter(std::move(shape), Buffer(n, value));
}

NamedTensors Module::NamedParameters() const {
  NamedTensors out;
  Collect("", &out);
  return out;
}

std::vector<Tensor> Module::Parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : NamedParameters()) out.push_back(t);
  return out;
}

std::size_t Module::NumParameters() const {
  std::size_t n = 0;
  for (auto& [name, t] : NamedParameters()) n += t.numel();
  return n;
}

void Module::ZeroGrad() {
  for (auto& t : Parameters()) t.ZeroGrad();
}

void Module::SetRequiresGrad(bool v) {
  for (auto& t : Parameters()) t.set_requires_grad(v);
}

void Module::CopyFrom(const Module& other) {
  auto mine = NamedParameters();
  auto theirs = other.NamedParameters();
  if (mine.size() != theirs.size())
    throw Error(ErrorKind::kConfigMismatch, "parameter count differs");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].first != theirs[i].first ||
        mine[i].second.shape() != theirs[i].second.shape())
      throw Error(ErrorKind::kConfigMismatch,
                  "parameter mismatch at " + mine[i].first);
    auto dst = mine[i].second.mutable_data();
    auto src = theirs[i].second.data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

Tensor Module::AddParameter(std::string name, Tensor t) {
  t.set_requires_grad(true);
  params_.emplace_back(std::move(name), std::move(t));
  return params_.back().second;
}

void Module::AddModule(std::string name, Module& child) {
  children_.emplace_back(std::move(name), &child);
}

void Module::Collect(const std::string& prefix, NamedTensors* out) const {
  for (const auto& [name, t] : params_) out->emplace_back(prefix + name, t);
  for (const auto& [name, child] : children_)
    child->Collect(prefix + name + ".", out);
}

}  // namespace fse::nn
