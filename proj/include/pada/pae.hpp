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
#include <vector>

#include "pada/nets.hpp"
#include "pada/rng.hpp"
#include "pada/tensor.hpp"

namespace pada::pae {

using num::Rng;
using num::Tensor;

enum class Provenance { ImagePosterior, TextPrior };

// Gaussian over the joint embedding space; sigma is always positive by the
// exp(logvar/2) parameterization.
struct Posterior {
  Tensor mu;
  Tensor sigma;
  Tensor logvar;
  Provenance provenance = Provenance::ImagePosterior;
  static Posterior from_mu_sigma(Tensor mu, Tensor sigma);
  double mean_sigma() const;
};

// Shared two-layer MLP backbone with mean / log-variance heads.
class PaeEncoder {
 public:
  PaeEncoder(std::size_t embed_dim, std::size_t hidden, Rng& rng);
  // Requires a unit-norm input in strict mode.
  Posterior encode(const Tensor& e_img) const;
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  std::size_t embed_dim() const { return dim_; }

 private:
  std::size_t dim_;
  nn::ParamSet params_;
  nn::Linear l1_, l2_, mu_head_, logvar_head_;
};

// e = mu + sigma .* eta, eta ~ N(0, I); gradients flow to mu and sigma.
Tensor sample_reparam(const Posterior& p, Rng& rng);

// e = e_txt + eps * eta. With normalize_eta, eta is rescaled to unit length
// (the regime of the sampling-concentration bound); the default raw eta is
// the training-time behavior.
Tensor sample_text_prior(const Tensor& e_txt, double eps, Rng& rng,
                         bool normalize_eta = false);

// Training form: -cos(mu, e_txt) + ||mu - e_img||_2
//                + 1/2 sum(sigma^2 - log sigma^2 - 1).
Tensor tkl_loss(const Posterior& p, const Tensor& e_txt, const Tensor& e_img);
// Verbatim KL(N(mu, sigma^2 I) || N(e_txt, I)); kept for testing the
// closed form against a Monte Carlo estimate.
Tensor tkl_pure_kl(const Posterior& p, const Tensor& e_txt);

struct LawOfCosines {
  double euclid_sq = 0.0;
  double cosine = 0.0;
};
// Both sides of the identity euclid_sq == 2 - 2 cos for unit vectors.
LawOfCosines theorem1_check(const std::vector<double>& u,
                            const std::vector<double>& v);

// CDF of the inner product of two independent uniform unit vectors in
// R^n: F(x) = int_{-1}^{x} Gamma(n/2)/(sqrt(pi) Gamma((n-1)/2))
//             (1-s^2)^{(n-3)/2} ds.
// n = 3 short-circuits to the exact (x+1)/2.
double inner_product_cdf(double x, int n);

// Lower bound on Prob(||e_txt - normalize(e_txt + eps*eta)||^2 <= m_star)
// for unit-uniform eta: 1 - F(1 - m_star/2 - m_star/(2 eps)), with the
// argument clamped to [-1, 1].
double theorem2_bound(double m_star, double eps, int n);

// Monte Carlo side of the bound: empirical probability over `samples`
// draws, counter-based per-draw streams (thread-count independent).
double mc_text_prior_probability(int n, double eps, double m_star,
                                 std::size_t samples, const Rng& rng);

// Sup-norm deviation between the quadrature CDF and the empirical CDF of
// u.v over `samples` draws, evaluated on a uniform grid.
double mc_cdf_sup_deviation(int n, std::size_t samples, const Rng& rng,
                            std::size_t grid = 201);

std::vector<double> random_unit_vector(int n, Rng& rng);

}  // namespace pada::pae
