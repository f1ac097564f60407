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

#include "pada/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "pada/errors.hpp"

namespace pada::num {

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

double* BackwardCtx::grad_of(const TensorNode* n, std::size_t size) {
  auto& buf = bufs_[n];
  if (buf.size() != size) buf.assign(size, 0.0);
  return buf.data();
}

const std::vector<double>* BackwardCtx::find(const TensorNode* n) const {
  auto it = bufs_.find(n);
  return it == bufs_.end() ? nullptr : &it->second;
}

std::vector<double> BackwardCtx::take(const TensorNode* n) {
  auto it = bufs_.find(n);
  if (it == bufs_.end()) return {};
  auto out = std::move(it->second);
  bufs_.erase(it);
  return out;
}

Tensor Tensor::zeros(Shape s, bool requires_grad) {
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(s);
  n->value.assign(shape_numel(n->shape), 0.0);
  n->requires_grad = requires_grad;
  n->on_tape = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::full(Shape s, double v) {
  Tensor t = zeros(std::move(s));
  for (auto& x : t.raw()) x = v;
  return t;
}

Tensor Tensor::from(Shape s, std::vector<double> data, bool requires_grad) {
  PADA_REQUIRE(shape_numel(s) == data.size(),
               "tensor data length " + std::to_string(data.size()) +
                   " does not match shape " + shape_str(s));
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(s);
  n->value = std::move(data);
  n->requires_grad = requires_grad;
  n->on_tape = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::scalar(double v) { return from({}, {v}); }

double Tensor::item() const {
  PADA_REQUIRE(size() == 1, "item() on non-scalar tensor " +
                                shape_str(shape()));
  return node_->value[0];
}

void Tensor::set_requires_grad(bool rg) {
  node_->requires_grad = rg;
  node_->on_tape = rg || node_->backward_fn != nullptr;
}

const std::vector<double>& Tensor::grad() const {
  static const std::vector<double> kEmpty;
  return node_->grad.empty() ? kEmpty : node_->grad;
}

void Tensor::zero_grad() { node_->grad.assign(size(), 0.0); }

Tensor Tensor::detached() const {
  auto n = std::make_shared<TensorNode>();
  n->shape = node_->shape;
  n->value = node_->value;
  return Tensor(std::move(n));
}

namespace {
thread_local bool g_grad_enabled = true;
bool g_strict = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

void set_strict(bool on) { g_strict = on; }
bool strict() { return g_strict; }

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

namespace {

// Topological order via iterative DFS over tape parents.
std::vector<const TensorNode*> topo_order(const TensorNode* root) {
  std::vector<const TensorNode*> order;
  std::unordered_set<const TensorNode*> seen;
  struct Frame {
    const TensorNode* n;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  stack.push_back({root, 0});
  seen.insert(root);
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_parent < f.n->parents.size()) {
      const TensorNode* p = f.n->parents[f.next_parent++].get();
      if (p->on_tape && !seen.count(p)) {
        seen.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  return order;  // parents before children
}

BackwardStats run_backward(const Tensor& loss, GradMap* sink) {
  PADA_REQUIRE(loss.defined(), "backward on undefined tensor");
  PADA_REQUIRE(loss.size() == 1,
               "backward requires a scalar loss, got " +
                   shape_str(loss.shape()));
  PADA_REQUIRE(loss.on_tape(), "backward on a tensor not on the tape");

  auto order = topo_order(loss.node());
  BackwardCtx ctx;
  ctx.grad_of(loss.node(), 1)[0] = 1.0;
  // Children first.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const TensorNode* n = *it;
    if (n->backward_fn) n->backward_fn(*n, ctx);
  }
  for (const TensorNode* n : order) {
    if (!n->requires_grad) continue;
    auto buf = ctx.take(n);
    if (buf.empty()) buf.assign(n->value.size(), 0.0);
    if (sink) {
      auto& dst = (*sink)[n];
      if (dst.empty()) {
        dst = std::move(buf);
      } else {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += buf[i];
      }
    } else {
      auto* mut = const_cast<TensorNode*>(n);
      if (mut->grad.size() != mut->value.size())
        mut->grad.assign(mut->value.size(), 0.0);
      for (std::size_t i = 0; i < buf.size(); ++i) mut->grad[i] += buf[i];
    }
  }
  return BackwardStats{order.size()};
}

}  // namespace

BackwardStats backward(const Tensor& loss) { return run_backward(loss, nullptr); }
BackwardStats backward(const Tensor& loss, GradMap& sink) {
  return run_backward(loss, &sink);
}

Tensor gaussian(Rng& rng, Shape s) {
  Tensor t = Tensor::zeros(std::move(s));
  for (auto& x : t.raw()) x = rng.gaussian();
  return t;
}

}  // namespace pada::num
