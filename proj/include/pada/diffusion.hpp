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

#include <filesystem>
#include <functional>
#include <vector>

#include "pada/corpus.hpp"
#include "pada/nets.hpp"
#include "pada/rng.hpp"
#include "pada/tensor.hpp"

namespace pada::diff {

using num::Rng;
using num::Tensor;

enum class ScheduleKind { Linear, Cosine };

// Per-step noising coefficients alpha_t and their running product.
struct NoiseSchedule {
  std::size_t T = 0;
  ScheduleKind kind = ScheduleKind::Linear;
  double beta_min = 0.0, beta_max = 0.0;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
  // Cumulative product with the convention alpha_bar(-1) = 1 (clean image).
  double abar(long t) const { return t < 0 ? 1.0 : alpha_bar[t]; }
};

NoiseSchedule make_schedule(std::size_t T, ScheduleKind kind, double beta_min,
                            double beta_max);
void save_schedule(const std::filesystem::path& path, const NoiseSchedule& s);
NoiseSchedule load_schedule(const std::filesystem::path& path);

struct QSample {
  Tensor x_t;
  Tensor eps;
};
// Closed-form marginal: x_t = sqrt(abar_t) x0 + sqrt(1-abar_t) eps.
QSample q_sample(const Tensor& x0, long t, const NoiseSchedule& sched,
                 Rng& rng);

Tensor time_embedding(long t, std::size_t dim);

struct DenoiserConfig {
  std::size_t channels = 32;
  std::size_t temb_dim = 32;
  std::size_t z_dim = 64;
  std::size_t image_hw = corpus::kH;
};

// Conditional noise predictor: 4 conv layers at constant resolution, the
// sinusoidal t embedding and the semantic code injected as per-channel
// scale/shift after each hidden conv.
class Denoiser {
 public:
  Denoiser(const DenoiserConfig& cfg, Rng& rng);
  Tensor forward(const Tensor& x_t, long t, const Tensor& z) const;
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  const DenoiserConfig& config() const { return cfg_; }

 private:
  DenoiserConfig cfg_;
  nn::ParamSet params_;
  nn::Conv2d c1_, c2_, c3_, c4_;
  nn::Linear film1_, film2_, film3_;
};

class SemanticEncoder {
 public:
  SemanticEncoder(std::size_t z_dim, std::size_t image_hw, Rng& rng);
  Tensor encode(const Tensor& x0) const;
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  std::size_t z_dim() const { return z_dim_; }

 private:
  std::size_t z_dim_, hw_;
  nn::ParamSet params_;
  nn::Conv2d e1_, e2_;
  nn::Linear head_;
};

// x0_hat = (x_t - sqrt(1-abar_t) eps_theta) / sqrt(abar_t)
Tensor predict_x0(const Tensor& x_t, long t, const Tensor& z,
                  const NoiseSchedule& sched, const Denoiser& den);
// Deterministic update from timestep t to t_prev (t_prev = -1 means clean).
Tensor ddim_step(const Tensor& x_t, long t, long t_prev, const Tensor& z,
                 const NoiseSchedule& sched, const Denoiser& den);
// Ascending timestep subsequence used for strided sampling; includes 0 and
// T-1, `steps` entries.
std::vector<long> stride_plan(std::size_t T, std::size_t steps);
Tensor ddim_sample(const Tensor& x_T, const Tensor& z,
                   const NoiseSchedule& sched, const Denoiser& den,
                   std::size_t steps);
// Runs the deterministic update in ascending order; x0 is treated as the
// state at timestep 0, so with eps==0 the map is the closed-form scaling
// chain sqrt(abar_{T-1}/abar_0).
Tensor ddim_invert(const Tensor& x0, const Tensor& z,
                   const NoiseSchedule& sched, const Denoiser& den,
                   std::size_t steps);

struct DiffaeConfig {
  std::size_t epochs = 8;
  std::size_t batch = 16;
  double lr = 1e-4;
};

struct PretrainHistory {
  std::vector<double> epoch_loss;
  // first-epoch average vs last-epoch average
  double drop_fraction() const;
};

// Noise-prediction pretraining of (Denoiser, SemanticEncoder) with the code
// always taken from the clean image. Throws NumericalError on divergence.
PretrainHistory pretrain_diffae(
    const std::vector<corpus::Sample>& data, const NoiseSchedule& sched,
    Denoiser& den, SemanticEncoder& enc, const DiffaeConfig& cfg, Rng& rng,
    const std::function<void(std::size_t, double)>& on_epoch = {});

}  // namespace pada::diff
