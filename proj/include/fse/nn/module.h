// include/fse/nn/module.h

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

#ifndef FSE_NN_MODULE_H_
#define FSE_NN_MODULE_H_

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fse/nn/tensor.h"

namespace fse::nn {

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

/// Seeded parameter initializer. Every model draws from one of these so
/// construction is reproducible from the seed alone.
class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : rng_(seed) {}

  Tensor Uniform(Shape shape, double bound);
  Tensor Normal(Shape shape, double stddev);
  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Tensor FanIn(Shape shape, std::size_t fan_in);
  Tensor Constant(Shape shape, double value);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Owner of named parameters and child modules. Children are referenced by
/// address, so modules are neither copyable nor movable.
class Module {
 public:
  Module() = default;
  virtual ~Module() = default;
  Module(const Module&) = delete;
  Module& operator=(const Module&) = delete;

  /// Depth-first list of parameters with dotted names.
  NamedTensors NamedParameters() const;
  std::vector<Tensor> Parameters() const;
  std::size_t NumParameters() const;

  void ZeroGrad();
  void SetRequiresGrad(bool v);

  /// Copies values from `other`, which must have identical names and shapes.
  void CopyFrom(const Module& other);

 protected:
  Tensor AddParameter(std::string name, Tensor t);
  void AddModule(std::string name, Module& child);

 private:
  void Collect(const std::string& prefix, NamedTensors* out) const;

  NamedTensors params_;
  std::vector<std::pair<std::string, Module*>> children_;
};

}  // namespace fse::nn

#endif  // FSE_NN_MODULE_H_
