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

#include <cstdint>
#include <string>
#include <vector>

#include "pada/tensor.hpp"

namespace pada::nn {

using num::Rng;
using num::Shape;
using num::Tensor;

struct NamedParam {
  std::string name;
  Tensor t;
};

// Ordered, named parameter registry. Order is the merge/update order, so
// training is reproducible independent of thread count.
class ParamSet {
 public:
  Tensor add(const std::string& name, Tensor t);
  std::vector<NamedParam>& items() { return items_; }
  const std::vector<NamedParam>& items() const { return items_; }
  Tensor* find(const std::string& name);
  std::size_t scalar_count() const;
  void zero_grads();
  void set_trainable(bool trainable);
  // FNV-1a over names and raw values; used for frozen-model checks.
  std::uint64_t value_hash() const;
  // Accumulate a collected gradient map into the leaf .grad buffers.
  void accumulate(const num::GradMap& grads);

 private:
  std::vector<NamedParam> items_;
};

Tensor gaussian_init(Rng& rng, Shape s, double stddev);
// He-style fan-in scaling for conv/linear weights.
Tensor he_init(Rng& rng, Shape s, std::size_t fan_in);

struct Linear {
  Tensor w;  // [out, in]
  Tensor b;  // [out]
  static Linear make(ParamSet& ps, const std::string& name, std::size_t in,
                     std::size_t out, Rng& rng, double w_scale = 1.0);
  Tensor operator()(const Tensor& x) const;  // x: [in] -> [out]
};

struct Conv2d {
  Tensor w;  // [co, ci, k, k]
  Tensor b;  // [co]
  std::size_t stride = 1, pad = 1;
  static Conv2d make(ParamSet& ps, const std::string& name, std::size_t ci,
                     std::size_t co, std::size_t k, std::size_t stride,
                     std::size_t pad, Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

class Adam {
 public:
  Adam(std::vector<ParamSet*> params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8);
  // Applies one update from the accumulated .grad buffers, then clears them.
  void step();
  double lr = 1e-4;

 private:
  std::vector<Tensor> tensors_;
  double b1_, b2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace pada::nn
