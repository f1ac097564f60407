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

#include "pada/pae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pada/errors.hpp"

namespace pada::pae {

Posterior Posterior::from_mu_sigma(Tensor mu, Tensor sigma) {
  PADA_REQUIRE(mu.shape() == sigma.shape(),
               "posterior: mu/sigma shape mismatch");
  for (double s : sigma.data())
    PADA_NUMERIC(s > 0.0, "posterior: sigma must be positive");
  Posterior p;
  p.logvar = num::log(num::square(sigma));
  p.mu = std::move(mu);
  p.sigma = std::move(sigma);
  return p;
}

double Posterior::mean_sigma() const {
  double acc = 0.0;
  for (double s : sigma.data()) acc += s;
  return sigma.size() ? acc / static_cast<double>(sigma.size()) : 0.0;
}

PaeEncoder::PaeEncoder(std::size_t embed_dim, std::size_t hidden, Rng& rng)
    : dim_(embed_dim) {
  l1_ = nn::Linear::make(params_, "pae.l1", embed_dim, hidden, rng);
  l2_ = nn::Linear::make(params_, "pae.l2", hidden, hidden, rng);
  mu_head_ = nn::Linear::make(params_, "pae.mu", hidden, embed_dim, rng, 0.3);
  logvar_head_ =
      nn::Linear::make(params_, "pae.logvar", hidden, embed_dim, rng, 0.1);
}

Posterior PaeEncoder::encode(const Tensor& e_img) const {
  PADA_REQUIRE(e_img.size() == dim_, "pae encode: wrong input size");
  if (num::strict()) {
    double n2 = 0.0;
    for (double v : e_img.data()) n2 += v * v;
    PADA_REQUIRE(std::abs(std::sqrt(n2) - 1.0) < 1e-6,
                 "pae encode: input must be unit-norm in strict mode");
  }
  Tensor h = num::silu(l1_(e_img));
  h = num::silu(l2_(h));
  Posterior p;
  p.mu = mu_head_(h);
  p.logvar = logvar_head_(h);
  p.sigma = num::exp(num::scale(p.logvar, 0.5));
  return p;
}

Tensor sample_reparam(const Posterior& p, Rng& rng) {
  Tensor eta = num::gaussian(rng, p.mu.shape());
  return num::add(p.mu, num::mul(p.sigma, eta));
}

Tensor sample_text_prior(const Tensor& e_txt, double eps, Rng& rng,
                         bool normalize_eta) {
  PADA_REQUIRE(eps >= 0.0, "sample_text_prior: eps must be >= 0");
  Tensor eta = num::gaussian(rng, e_txt.shape());
  if (normalize_eta) {
    double n2 = 0.0;
    for (double v : eta.data()) n2 += v * v;
    const double inv = 1.0 / std::max(1e-300, std::sqrt(n2));
    for (auto& v : eta.raw()) v *= inv;
  }
  return num::add(e_txt, num::scale(eta, eps));
}

namespace {
// sigma^2 - log sigma^2 - 1 written on logvar: exp(lv) - lv - 1.
Tensor variance_term(const Tensor& logvar) {
  return num::sum(num::add_scalar(
      num::sub(num::exp(logvar), logvar), -1.0));
}
}  // namespace

Tensor tkl_loss(const Posterior& p, const Tensor& e_txt, const Tensor& e_img) {
  Tensor cos_term = num::neg(num::cosine(p.mu, e_txt));
  Tensor norm_term = num::l2norm(num::sub(p.mu, e_img));
  Tensor var_term = num::scale(variance_term(p.logvar), 0.5);
  return num::add(num::add(cos_term, norm_term), var_term);
}

Tensor tkl_pure_kl(const Posterior& p, const Tensor& e_txt) {
  Tensor quad = num::norm2sq(num::sub(p.mu, e_txt));
  return num::scale(num::add(quad, variance_term(p.logvar)), 0.5);
}

LawOfCosines theorem1_check(const std::vector<double>& u,
                            const std::vector<double>& v) {
  PADA_REQUIRE(u.size() == v.size(), "theorem1_check: dimension mismatch");
  LawOfCosines out;
  double uu = 0.0, vv = 0.0, uv = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
    d2 += (u[i] - v[i]) * (u[i] - v[i]);
  }
  out.euclid_sq = d2;
  out.cosine = uv / std::max(1e-300, std::sqrt(uu) * std::sqrt(vv));
  return out;
}

namespace {

double cdf_density_logconst(int n) {
  // log of Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2))
  return std::lgamma(n / 2.0) - 0.5 * std::log(std::numbers::pi) -
         std::lgamma((n - 1) / 2.0);
}

double cdf_integrand(double s, double expo, double logc) {
  const double base = 1.0 - s * s;
  if (base <= 0.0) return expo == 0.0 ? std::exp(logc) : 0.0;
  return std::exp(logc + expo * std::log(base));
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, double expo,
                        double logc) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = cdf_integrand(lm, expo, logc);
  const double frm = cdf_integrand(rm, expo, logc);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(a, m, fa, flm, fm, left, tol * 0.5, depth - 1, expo,
                          logc) +
         adaptive_simpson(m, b, fm, frm, fb, right, tol * 0.5, depth - 1, expo,
                          logc);
}

}  // namespace

double inner_product_cdf(double x, int n) {
  PADA_REQUIRE(n >= 3, "inner_product_cdf: dimension must be >= 3");
  PADA_REQUIRE(x >= -1.0 && x <= 1.0,
               "inner_product_cdf: x must lie in [-1, 1]");
  if (n == 3) return (x + 1.0) * 0.5;  // uniform marginal on the 2-sphere
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double expo = (n - 3) / 2.0;
  const double logc = cdf_density_logconst(n);
  // Integrate over the smaller tail and use symmetry of the density.
  const bool upper = x > 0.0;
  const double a = upper ? x : -1.0;
  const double b = upper ? 1.0 : x;
  const double fa = cdf_integrand(a, expo, logc);
  const double fb = cdf_integrand(b, expo, logc);
  const double fm = cdf_integrand(0.5 * (a + b), expo, logc);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tail = adaptive_simpson(a, b, fa, fm, fb, whole, 1e-9, 48,
                                       expo, logc);
  return upper ? 1.0 - tail : tail;
}

double theorem2_bound(double m_star, double eps, int n) {
  PADA_REQUIRE(m_star > 0.0, "theorem2_bound: m_star must be > 0");
  PADA_REQUIRE(eps > 0.0, "theorem2_bound: eps must be > 0");
  const double arg = 1.0 - m_star / 2.0 - m_star / (2.0 * eps);
  if (arg <= -1.0) return 1.0;
  if (arg >= 1.0) return 0.0;
  return 1.0 - inner_product_cdf(arg, n);
}

std::vector<double> random_unit_vector(int n, Rng& rng) {
  std::vector<double> v(n);
  double n2 = 0.0;
  for (auto& x : v) {
    x = rng.gaussian();
    n2 += x * x;
  }
  const double inv = 1.0 / std::max(1e-300, std::sqrt(n2));
  for (auto& x : v) x *= inv;
  return v;
}

double mc_text_prior_probability(int n, double eps, double m_star,
                                 std::size_t samples, const Rng& rng) {
  PADA_REQUIRE(n >= 2 && samples > 0, "mc_text_prior_probability: bad args");
  // By rotational symmetry fix e_txt = e1.
  std::size_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples); ++i) {
    Rng r = rng.fork(static_cast<std::uint64_t>(i));
    auto eta = random_unit_vector(n, r);
    // e = normalize(e1 + eps * eta)
    double n2 = 0.0;
    eta[0] = 1.0 + eps * eta[0];
    for (int d = 1; d < n; ++d) eta[d] *= eps;
    for (int d = 0; d < n; ++d) n2 += eta[d] * eta[d];
    const double inv = 1.0 / std::sqrt(n2);
    double d2 = (eta[0] * inv - 1.0) * (eta[0] * inv - 1.0);
    for (int d = 1; d < n; ++d) d2 += eta[d] * inv * eta[d] * inv;
    hits += d2 <= m_star;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double mc_cdf_sup_deviation(int n, std::size_t samples, const Rng& rng,
                            std::size_t grid) {
  PADA_REQUIRE(n >= 3 && samples > 0 && grid >= 3,
               "mc_cdf_sup_deviation: bad args");
  // u.v for independent uniform unit vectors has the law of the first
  // coordinate of one uniform unit vector.
  std::vector<std::size_t> counts(grid, 0);
#pragma omp parallel
  {
    std::vector<std::size_t> local(grid, 0);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(samples); ++i) {
      Rng r = rng.fork(static_cast<std::uint64_t>(i));
      auto v = random_unit_vector(n, r);
      const double s = v[0];
      // Smallest grid index g with x_g >= s; prefix sums then give the
      // empirical CDF at every grid point.
      const double t = (s + 1.0) * 0.5 * static_cast<double>(grid - 1);
      const std::size_t cell = static_cast<std::size_t>(std::clamp<long>(
          static_cast<long>(std::ceil(t)), 0, static_cast<long>(grid - 1)));
      ++local[cell];
    }
#pragma omp critical
    for (std::size_t g = 0; g < grid; ++g) counts[g] += local[g];
  }
  // counts[g] = #samples in (x_{g-1}, x_g]; prefix-sum to get empirical CDF
  double sup = 0.0;
  std::size_t running = 0;
  for (std::size_t g = 0; g < grid; ++g) {
    running += counts[g];
    const double x =
        -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(grid - 1);
    const double emp =
        static_cast<double>(running) / static_cast<double>(samples);
    sup = std::max(sup, std::abs(emp - inner_product_cdf(x, n)));
  }
  return sup;
}

}  // namespace pada::pae
