// include/fse/nn/tensor.h

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

#ifndef FSE_NN_TENSOR_H_
#define FSE_NN_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <initializer_list>
#include <new>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fse::nn {

using Shape = std::vector<std::size_t>;

/// Allocator returning 64-byte aligned storage. Vectorized kernels take
/// different code paths for different alignments, so fixing it keeps
/// results bit-reproducible from run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlign = 64;
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kAlign}));
  }
  void deallocate(T* p, std::size_t) {
    ::operator delete(p, std::align_val_t{kAlign});
  }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using Buffer = std::vector<double, AlignedAllocator<double>>;

inline bool operator==(const Buffer& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

std::size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

struct Node {
  Shape shape;
  Buffer data;
  Buffer grad;  // allocated lazily
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the inputs that need it.
  std::function<void(Node&)> backward;

  void EnsureGrad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

/// Handle to a dense double-precision array that may participate in a
/// reverse-mode autodiff graph. Copies share the underlying storage.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor Zeros(Shape shape);
  static Tensor Full(Shape shape, double value);
  static Tensor FromData(Shape shape, Buffer data);
  static Tensor FromData(Shape shape, const std::vector<double>& data);
  static Tensor FromData(Shape shape, std::initializer_list<double> data) {
    return FromData(std::move(shape), Buffer(data));
  }
  static Tensor Scalar(double v);
  /// Leaf that accumulates gradients.
  static Tensor Parameter(Shape shape, Buffer data);
  static Tensor Parameter(Shape shape, const std::vector<double>& data) {
    return Parameter(std::move(shape), Buffer(data.begin(), data.end()));
  }
  static Tensor Parameter(Shape shape, std::initializer_list<double> data) {
    return Parameter(std::move(shape), Buffer(data));
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->data.size(); }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data() { return node_->data; }
  const Buffer& values() const { return node_->data; }
  std::vector<double> ToVector() const {
    return std::vector<double>(node_->data.begin(), node_->data.end());
  }
  /// Zero-length when no gradient has been accumulated yet.
  std::span<const double> grad() const { return node_->grad; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool v) { node_->requires_grad = v; }
  void ZeroGrad() { node_->grad.clear(); }

  /// Value copy with no graph history.
  Tensor Detach() const;

  /// Back-propagates from a scalar (seed 1) or from an explicit seed with
  /// the tensor's shape. Intermediate graph state is released afterwards.
  void Backward();
  void Backward(std::span<const double> seed);

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Disables graph recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

/// Creates the result of an op; records `inputs` and `backward` only when
/// recording is enabled and some input requires a gradient.
Tensor MakeResult(Shape shape, Buffer data,
                  std::vector<Tensor> inputs,
                  std::function<void(Node&)> backward);

/// Multiply-accumulate counter for conv/linear/attention/recurrent ops on
/// the calling thread. Norms and pointwise activations are not counted.
class MacCounter {
 public:
  static void Add(std::uint64_t macs);
  static std::uint64_t Get();
  static void Reset();
};

}  // namespace fse::nn

#endif  // FSE_NN_TENSOR_H_
