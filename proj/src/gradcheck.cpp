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

#include "pada/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pada/errors.hpp"

namespace pada::num {

namespace {

double eval_scalar(const std::function<Tensor()>& f) {
  NoGradGuard ng;
  Tensor y = f();
  PADA_REQUIRE(y.size() == 1, "grad_check: f must be scalar-valued");
  const double v = y.item();
  PADA_NUMERIC(std::isfinite(v), "grad_check: non-finite function value");
  return v;
}

double check_coords(const std::function<Tensor()>& f, Tensor& p,
                    const std::vector<double>& analytic,
                    const std::vector<std::size_t>& coords, double step) {
  double worst = 0.0;
  for (std::size_t i : coords) {
    const double saved = p.raw()[i];
    p.raw()[i] = saved + step;
    const double fp = eval_scalar(f);
    p.raw()[i] = saved - step;
    const double fm = eval_scalar(f);
    p.raw()[i] = saved;
    const double central = (fp - fm) / (2.0 * step);
    const double rel =
        std::abs(analytic[i] - central) / std::max(1e-8, std::abs(central));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor theta,
                  double step) {
  PADA_REQUIRE(step > 0.0, "grad_check: step must be > 0");
  theta.set_requires_grad(true);
  theta.zero_grad();
  Tensor loss = f(theta);
  PADA_REQUIRE(loss.size() == 1, "grad_check: f must be scalar-valued");
  PADA_NUMERIC(std::isfinite(loss.item()),
               "grad_check: non-finite function value");
  backward(loss);
  std::vector<double> analytic = theta.grad();
  std::vector<std::size_t> coords(theta.size());
  std::iota(coords.begin(), coords.end(), 0);
  auto f0 = [&]() { return f(theta); };
  return check_coords(f0, theta, analytic, coords, step);
}

double grad_check_params(const std::function<Tensor()>& f,
                         std::span<Tensor> params, double step,
                         std::optional<std::size_t> coords_per_param,
                         Rng* rng) {
  PADA_REQUIRE(step > 0.0, "grad_check: step must be > 0");
  for (Tensor& p : params) {
    p.set_requires_grad(true);
    p.zero_grad();
  }
  Tensor loss = f();
  PADA_REQUIRE(loss.size() == 1, "grad_check: f must be scalar-valued");
  PADA_NUMERIC(std::isfinite(loss.item()),
               "grad_check: non-finite function value");
  backward(loss);

  double worst = 0.0;
  for (Tensor& p : params) {
    std::vector<double> analytic = p.grad();
    if (analytic.empty()) analytic.assign(p.size(), 0.0);
    std::vector<std::size_t> coords;
    if (coords_per_param && *coords_per_param < p.size()) {
      PADA_REQUIRE(rng != nullptr, "grad_check: rng required for subsampling");
      for (std::size_t j = 0; j < *coords_per_param; ++j)
        coords.push_back(rng->next_u64() % p.size());
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    } else {
      coords.resize(p.size());
      std::iota(coords.begin(), coords.end(), 0);
    }
    worst = std::max(worst, check_coords(f, p, analytic, coords, step));
  }
  return worst;
}

}  // namespace pada::num
