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
#include <vector>

#include "pada/nets.hpp"
#include "pada/rng.hpp"
#include "pada/tensor.hpp"

namespace pada::nn {

// Evaluates per-sample scalar losses in parallel with per-sample tapes and
// merges leaf gradients into .grad in sample order, so the result is
// independent of the thread count. Returns the per-sample loss values.
std::vector<double> batch_backward(
    std::size_t n, const std::function<num::Tensor(std::size_t)>& sample_loss,
    std::vector<ParamSet*> params);

// Deterministic Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, num::Rng& rng);

}  // namespace pada::nn
