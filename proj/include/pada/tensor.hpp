// Copyright 2026 The pada Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pada/rng.hpp"

namespace pada::num {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

class TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

// Call-local gradient buffers: backward never mutates nodes, so graphs over
// shared frozen parameters can run backward concurrently from many threads.
class BackwardCtx {
 public:
  double* grad_of(const TensorNode* n, std::size_t size);
  const std::vector<double>* find(const TensorNode* n) const;
  std::vector<double> take(const TensorNode* n);

 private:
  std::unordered_map<const TensorNode*, std::vector<double>> bufs_;
};

class TensorNode {
 public:
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // leaf accumulation (single-threaded use)
  bool requires_grad = false;
  bool on_tape = false;
  std::vector<NodePtr> parents;
  std::function<void(const TensorNode&, BackwardCtx&)> backward_fn;
};

// Value-semantic handle onto a shared node. Values are immutable once the
// tensor has been consumed by an op; grads accumulate on leaves.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape s, bool requires_grad = false);
  static Tensor full(Shape s, double v);
  static Tensor from(Shape s, std::vector<double> data,
                     bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t size() const { return node_->value.size(); }
  std::size_t rank() const { return node_->shape.size(); }
  const std::vector<double>& data() const { return node_->value; }
  // Mutable access for initialization; do not mutate once used in a graph.
  std::vector<double>& raw() { return node_->value; }
  double item() const;
  double at(std::size_t i) const { return node_->value[i]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool rg);
  bool on_tape() const { return node_ && node_->on_tape; }
  const std::vector<double>& grad() const;
  void zero_grad();

  // Copy of values only; detached from the tape.
  Tensor detached() const;

  TensorNode* node() const { return node_.get(); }
  const NodePtr& ptr() const { return node_; }
  explicit Tensor(NodePtr n) : node_(std::move(n)) {}

 private:
  NodePtr node_;
};

// Thread-local autodiff switch.
bool grad_enabled();
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// Strict mode adds domain checks (log/sqrt of negatives, division by zero).
void set_strict(bool on);
bool strict();

struct BackwardStats {
  std::size_t visited = 0;
};
using GradMap = std::unordered_map<const TensorNode*, std::vector<double>>;

// Accumulates into leaf .grad buffers. Not safe for concurrent use over
// shared leaves; parallel callers use the sink overload and merge in a fixed
// order.
BackwardStats backward(const Tensor& loss);
BackwardStats backward(const Tensor& loss, GradMap& sink);

// ---- primitive ops (tape-aware) ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double c);
Tensor scale(const Tensor& a, double c);
Tensor neg(const Tensor& a);
// Contracts the last dim of a with the first dim of b.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose2d(const Tensor& a);
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              std::size_t stride, std::size_t pad);
// y[c,h,w] = x[c,h,w] * (1 + s[c]) + b[c]
Tensor scale_shift_channels(const Tensor& x, const Tensor& s, const Tensor& b);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor var(const Tensor& a);  // population variance
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor silu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor square(const Tensor& a);
Tensor clamp_min(const Tensor& a, double lo);
Tensor concat0(std::span<const Tensor> parts);
Tensor slice0(const Tensor& a, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& a, Shape s);
// logits: rank-1 [K]; returns scalar -log softmax(logits)[target].
Tensor softmax_cross_entropy(const Tensor& logits, std::size_t target);

// ---- composed helpers ----
Tensor dot(const Tensor& a, const Tensor& b);
Tensor norm2sq(const Tensor& a);
Tensor l2norm(const Tensor& a);
Tensor normalize(const Tensor& a);  // a / ||a||; error on zero norm in strict
Tensor cosine(const Tensor& a, const Tensor& b);

// Random value tensors (never on the tape).
Tensor gaussian(Rng& rng, Shape s);

bool all_finite(const std::vector<double>& v);

}  // namespace pada::num
