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

#include "pada/nets.hpp"
#include "pada/rng.hpp"
#include "pada/tensor.hpp"

namespace pada::cond {

using num::Rng;
using num::Tensor;

// Adaptive modulation: translates a sampled aging embedding into the
// stochastic age condition by normalizing the semantic code channel-wise
// and applying a learned scale and shift.
class AgeTranslator {
 public:
  AgeTranslator(std::size_t embed_dim, std::size_t z_dim, std::size_t hidden,
                Rng& rng);

  // Two-layer MLP e_age -> delta_z.
  Tensor translate(const Tensor& e_age) const;
  Tensor gamma(const Tensor& delta_z) const;
  Tensor beta(const Tensor& delta_z) const;
  // z_age = gamma(dz) .* (z_src - mean(z_src)) / std(z_src) + beta(dz),
  // with the channel-wise std floored at 1e-8 (disable only to observe the
  // degenerate failure).
  Tensor modulate(const Tensor& z_src, const Tensor& delta_z,
                  bool floor_sigma = true) const;

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  std::size_t z_dim() const { return z_dim_; }
  std::size_t embed_dim() const { return embed_dim_; }

 private:
  std::size_t embed_dim_, z_dim_;
  nn::ParamSet params_;
  nn::Linear t1_, t2_;
  nn::Linear g1_, g2_;
  nn::Linear b1_, b2_;
};

// z_tar = z_src + z_age
Tensor compose_target(const Tensor& z_src, const Tensor& z_age);

// Channel normalization used by modulate, exposed for testing.
Tensor channel_normalize(const Tensor& z, bool floor_sigma = true);

}  // namespace pada::cond
