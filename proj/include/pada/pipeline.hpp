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

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "pada/conditioning.hpp"
#include "pada/corpus.hpp"
#include "pada/diffusion.hpp"
#include "pada/losses.hpp"
#include "pada/pae.hpp"
#include "pada/perception.hpp"

namespace pada::pipe {

using corpus::Sample;
using num::Rng;
using num::Tensor;

struct ModelDims {
  std::size_t channels = 32;    // denoiser width
  std::size_t z_dim = 64;       // semantic code
  std::size_t embed_dim = percep::kEmbedDim;
  std::size_t pae_hidden = 64;
  std::size_t trans_hidden = 64;
};

// All stages bundled: the frozen diffusion decoder + semantic encoder, the
// three frozen perception models, and the trainable age encoder
// (PaeEncoder + AgeTranslator).
struct Models {
  ModelDims dims;
  corpus::BinSpec bins;
  diff::NoiseSchedule sched;
  std::unique_ptr<diff::Denoiser> den;
  std::unique_ptr<diff::SemanticEncoder> sem;
  std::unique_ptr<percep::JointEmbedder> joint;
  std::unique_ptr<percep::AgeEstimator> age;
  std::unique_ptr<percep::IdEmbedder> idn;
  std::unique_ptr<pae::PaeEncoder> pae_enc;
  std::unique_ptr<cond::AgeTranslator> translator;

  static Models make(const ModelDims& dims, std::uint64_t seed);
  // Reinitializes only the trainable age encoder (baseline comparisons).
  void reset_age_encoder(std::uint64_t seed);
  void freeze_backbones();
  std::uint64_t frozen_hash() const;
  std::uint64_t trainable_hash() const;
};

void save_models(const std::filesystem::path& dir, const Models& m);
Models load_models(const std::filesystem::path& dir);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch = 16;
  double lr = 1e-4;
  double beta1 = 0.9, beta2 = 0.999;
  loss::LossWeights weights;
  double branch_posterior = 0.5;  // r <= 0.5: reference-image posterior
  double branch_text = 0.8;       // r <= 0.8: text prior; else self branch
  double eps_text = 0.001;
  bool normalize_eta = false;
  std::uint64_t seed = 1;
};

struct StepStats {
  loss::LossBreakdown mean;
  std::array<std::size_t, 3> branches{0, 0, 0};
};

// One Algorithm-style step over a batch of source indices: per-sample
// stochastic branch, one-step predictions at a uniformly drawn timestep,
// gradient step on the age encoder only.
StepStats train_step(const std::vector<Sample>& data,
                     std::span<const std::size_t> batch, Models& m,
                     nn::Adam& opt, const TrainConfig& cfg,
                     const Rng& step_rng);

struct TrainReport {
  std::vector<loss::LossBreakdown> epoch_mean;
  std::array<std::size_t, 3> branches{0, 0, 0};
  std::uint64_t frozen_hash_before = 0, frozen_hash_after = 0;
  double smoothed_drop = 0.0;  // 1 - last/first of smoothed totals
};

TrainReport train(const std::vector<Sample>& data, Models& m,
                  const TrainConfig& cfg,
                  const std::filesystem::path& out_dir);

enum class ConditionKind { Reference, Anchor, AnchorLerp };
enum class Variation { None, Low, High };

struct InferenceRequest {
  Tensor source;
  ConditionKind kind = ConditionKind::Anchor;
  Tensor reference;                   // ConditionKind::Reference
  int anchor = -1;                    // ConditionKind::Anchor
  int anchor_a = -1, anchor_b = -1;   // ConditionKind::AnchorLerp
  double lerp_w = 0.5;
  std::size_t steps = 25;
  Variation variation = Variation::None;
  std::size_t count = 1;  // number of variants for Low/High
  double eps = 0.001;     // sampling intensity for text-driven conditions
  bool invert_init = false;  // reconstruction-anchored terminal noise
  std::uint64_t seed = 0;
};

std::vector<Tensor> infer(const InferenceRequest& req, const Models& m);

// e' = e + mean over bins of (anchor(bin, to) - anchor(bin, from)),
// optionally renormalized; identity when the families are equal.
Tensor attribute_shift(const Tensor& e_age, int family_from, int family_to,
                       const Models& m, bool renormalize = true);

struct Pca2 {
  std::vector<double> c1, c2;   // orthonormal components
  double var1 = 0, var2 = 0;    // captured variance along each
  std::vector<std::array<double, 2>> projections;
};
// Top-2 principal components by power iteration with deflation.
Pca2 pca_top2(const std::vector<std::vector<double>>& rows,
              std::uint64_t seed);

struct EvalConfig {
  std::size_t sources = 48;
  std::size_t div_sources = 24;
  std::size_t variants = 4;
  std::vector<double> eps_grid{0.01, 0.1, 0.25, 0.5};
  std::size_t steps = 25;
  std::uint64_t seed = 7;
};

struct EvalMetrics {
  double age_mae = 0.0;
  double id_score = 0.0;        // cos(R(source), R(generated))
  double id_score_recon = 0.0;  // cos(R(reconstruction), R(generated))
  std::vector<double> diversity_by_eps;
  std::vector<double> id_by_eps;
  double pca_var1 = 0.0, pca_var2 = 0.0;
};

// Aging accuracy / identity preservation / diversity sweep / latent-code
// PCA export. Writes metrics.csv, diversity.csv and latents.csv in out_dir
// when it is non-empty.
EvalMetrics evaluate(const Models& m, const std::vector<Sample>& testset,
                     const EvalConfig& cfg,
                     const std::filesystem::path& out_dir);

}  // namespace pada::pipe
