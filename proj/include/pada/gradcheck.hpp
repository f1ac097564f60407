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

#include <functional>
#include <optional>

#include "pada/tensor.hpp"

namespace pada::num {

// Central-difference oracle: max over coordinates of
//   |analytic - central| / max(1e-8, |central|).
// The analytic side runs backward() once; the numeric side re-evaluates f
// with single-coordinate perturbations under NoGrad.
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor theta,
                  double step);

// Same oracle over a set of parameters, optionally subsampling coordinates
// (seeded) so large models stay checkable in bounded time.
double grad_check_params(const std::function<Tensor()>& f,
                         std::span<Tensor> params, double step,
                         std::optional<std::size_t> coords_per_param = {},
                         Rng* rng = nullptr);

}  // namespace pada::num
