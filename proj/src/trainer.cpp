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

#include "pada/trainer.hpp"

#include <exception>
#include <numeric>

namespace pada::nn {

std::vector<double> batch_backward(
    std::size_t n, const std::function<num::Tensor(std::size_t)>& sample_loss,
    std::vector<ParamSet*> params) {
  std::vector<num::GradMap> maps(n);
  std::vector<double> losses(n, 0.0);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      num::Tensor loss = sample_loss(static_cast<std::size_t>(i));
      losses[static_cast<std::size_t>(i)] = loss.item();
      num::backward(loss, maps[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  // Fixed merge order keeps accumulation bitwise reproducible.
  for (std::size_t i = 0; i < n; ++i)
    for (ParamSet* ps : params) ps->accumulate(maps[i]);
  return losses;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, num::Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.next_u64() % i;
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace pada::nn
