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

#include "pada/conditioning.hpp"

#include "pada/errors.hpp"

namespace pada::cond {

AgeTranslator::AgeTranslator(std::size_t embed_dim, std::size_t z_dim,
                             std::size_t hidden, Rng& rng)
    : embed_dim_(embed_dim), z_dim_(z_dim) {
  t1_ = nn::Linear::make(params_, "trans.l1", embed_dim, hidden, rng);
  t2_ = nn::Linear::make(params_, "trans.l2", hidden, z_dim, rng);
  g1_ = nn::Linear::make(params_, "gamma.l1", z_dim, z_dim, rng);
  g2_ = nn::Linear::make(params_, "gamma.l2", z_dim, z_dim, rng, 0.1);
  b1_ = nn::Linear::make(params_, "beta.l1", z_dim, z_dim, rng);
  b2_ = nn::Linear::make(params_, "beta.l2", z_dim, z_dim, rng, 0.1);
}

Tensor AgeTranslator::translate(const Tensor& e_age) const {
  PADA_REQUIRE(e_age.size() == embed_dim_,
               "translate: expected embedding of size " +
                   std::to_string(embed_dim_));
  return t2_(num::silu(t1_(e_age)));
}

Tensor AgeTranslator::gamma(const Tensor& delta_z) const {
  return g2_(num::silu(g1_(delta_z)));
}

Tensor AgeTranslator::beta(const Tensor& delta_z) const {
  return b2_(num::silu(b1_(delta_z)));
}

Tensor channel_normalize(const Tensor& z, bool floor_sigma) {
  Tensor mu = num::mean(z);
  Tensor sd = num::sqrt(num::var(z));
  if (floor_sigma) sd = num::clamp_min(sd, 1e-8);
  return num::div(num::sub(z, mu), sd);
}

Tensor AgeTranslator::modulate(const Tensor& z_src, const Tensor& delta_z,
                               bool floor_sigma) const {
  PADA_REQUIRE(z_src.size() == z_dim_ && delta_z.size() == z_dim_,
               "modulate: dimension mismatch: z_src " +
                   num::shape_str(z_src.shape()) + ", delta_z " +
                   num::shape_str(delta_z.shape()));
  Tensor norm = channel_normalize(z_src, floor_sigma);
  return num::add(num::mul(gamma(delta_z), norm), beta(delta_z));
}

Tensor compose_target(const Tensor& z_src, const Tensor& z_age) {
  PADA_REQUIRE(z_src.shape() == z_age.shape(),
               "compose_target: shape mismatch: " +
                   num::shape_str(z_src.shape()) + " vs " +
                   num::shape_str(z_age.shape()));
  return num::add(z_src, z_age);
}

}  // namespace pada::cond
