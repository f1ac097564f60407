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

#include "pada/nets.hpp"

#include <cmath>
#include <cstring>

#include "pada/errors.hpp"

namespace pada::nn {

Tensor ParamSet::add(const std::string& name, Tensor t) {
  PADA_REQUIRE(find(name) == nullptr, "duplicate parameter name: " + name);
  t.set_requires_grad(true);
  items_.push_back({name, t});
  return t;
}

Tensor* ParamSet::find(const std::string& name) {
  for (auto& it : items_)
    if (it.name == name) return &it.t;
  return nullptr;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& it : items_) n += it.t.size();
  return n;
}

void ParamSet::zero_grads() {
  for (auto& it : items_) it.t.zero_grad();
}

void ParamSet::set_trainable(bool trainable) {
  for (auto& it : items_) it.t.set_requires_grad(trainable);
}

std::uint64_t ParamSet::value_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  auto eat = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001B3ull;
    }
  };
  for (const auto& it : items_) {
    eat(it.name.data(), it.name.size());
    eat(it.t.data().data(), it.t.size() * sizeof(double));
  }
  return h;
}

void ParamSet::accumulate(const num::GradMap& grads) {
  for (auto& it : items_) {
    auto found = grads.find(it.t.node());
    if (found == grads.end()) continue;
    if (it.t.node()->grad.size() != it.t.size())
      it.t.node()->grad.assign(it.t.size(), 0.0);
    auto& dst = it.t.node()->grad;
    const auto& src = found->second;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

Tensor gaussian_init(Rng& rng, Shape s, double stddev) {
  Tensor t = num::gaussian(rng, std::move(s));
  for (auto& x : t.raw()) x *= stddev;
  return t;
}

Tensor he_init(Rng& rng, Shape s, std::size_t fan_in) {
  return gaussian_init(rng, std::move(s),
                       std::sqrt(2.0 / static_cast<double>(fan_in)));
}

Linear Linear::make(ParamSet& ps, const std::string& name, std::size_t in,
                    std::size_t out, Rng& rng, double w_scale) {
  Linear l;
  Tensor w = he_init(rng, {out, in}, in);
  if (w_scale != 1.0)
    for (auto& x : w.raw()) x *= w_scale;
  l.w = ps.add(name + ".w", w);
  l.b = ps.add(name + ".b", Tensor::zeros({out}));
  return l;
}

Tensor Linear::operator()(const Tensor& x) const {
  return num::add(num::matmul(w, x), b);
}

Conv2d Conv2d::make(ParamSet& ps, const std::string& name, std::size_t ci,
                    std::size_t co, std::size_t k, std::size_t stride,
                    std::size_t pad, Rng& rng) {
  Conv2d c;
  c.stride = stride;
  c.pad = pad;
  c.w = ps.add(name + ".w", he_init(rng, {co, ci, k, k}, ci * k * k));
  c.b = ps.add(name + ".b", Tensor::zeros({co}));
  return c;
}

Tensor Conv2d::operator()(const Tensor& x) const {
  return num::conv2d(x, w, b, stride, pad);
}

Adam::Adam(std::vector<ParamSet*> params, double lr_, double beta1,
           double beta2, double eps)
    : lr(lr_), b1_(beta1), b2_(beta2), eps_(eps) {
  for (ParamSet* ps : params)
    for (const auto& it : ps->items()) {
      tensors_.push_back(it.t);
      m_.emplace_back(it.t.size(), 0.0);
      v_.emplace_back(it.t.size(), 0.0);
    }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t p = 0; p < tensors_.size(); ++p) {
    Tensor& t = tensors_[p];
    if (t.node()->grad.size() != t.size()) continue;  // never touched
    auto& g = t.node()->grad;
    auto& val = t.raw();
    for (std::size_t i = 0; i < val.size(); ++i) {
      m_[p][i] = b1_ * m_[p][i] + (1.0 - b1_) * g[i];
      v_[p][i] = b2_ * v_[p][i] + (1.0 - b2_) * g[i] * g[i];
      const double mh = m_[p][i] / c1;
      const double vh = v_[p][i] / c2;
      val[i] -= lr * mh / (std::sqrt(vh) + eps_);
    }
    t.zero_grad();
  }
}

}  // namespace pada::nn
