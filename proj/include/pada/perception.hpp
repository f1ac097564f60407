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
#include <vector>

#include "pada/corpus.hpp"
#include "pada/nets.hpp"
#include "pada/rng.hpp"
#include "pada/tensor.hpp"

namespace pada::percep {

using corpus::Sample;
using num::Rng;
using num::Tensor;

inline constexpr std::size_t kEmbedDim = 32;
inline constexpr std::size_t kFeatDim = 16;

struct TrainConfig {
  std::size_t epochs = 6;
  std::size_t batch = 32;
  double lr = 1e-3;
};

// Joint image/anchor embedding on the unit hypersphere. The 14 anchor
// vectors are learned and stand in for the encoded bin/family descriptions;
// every exposed embedding is L2-normalized.
class JointEmbedder {
 public:
  explicit JointEmbedder(Rng& rng);
  Tensor embed_image(const Tensor& image) const;  // unit-norm [kEmbedDim]
  Tensor embed_anchor(int anchor_id) const;       // unit-norm [kEmbedDim]
  // Flattened convolutional features; the perceptual-distance proxy.
  Tensor penultimate(const Tensor& image) const;
  // [kAnchors, kEmbedDim] with normalized rows.
  Tensor anchor_matrix() const;
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  nn::ParamSet params_;
  nn::Conv2d c1_, c2_;
  nn::Linear head_;
  Tensor anchors_;  // raw (unnormalized) table
};

struct JointReport {
  double retrieval_accuracy = 0.0;  // held-out nearest-anchor accuracy
  double own_anchor_margin = 0.0;   // mean cos(own) - mean cos(best other)
  double mean_within_bin_cos = 0.0;
  std::vector<double> epoch_loss;
};

// Symmetric InfoNCE between image embeddings and their anchors
// (temperature 0.07). Throws NumericalError if the anchors collapse.
JointReport pretrain_joint(JointEmbedder& model,
                           const std::vector<Sample>& train,
                           const std::vector<Sample>& heldout,
                           const TrainConfig& cfg, Rng& rng);

// Age regressor; `features` is the penultimate activation used by the
// aging triplet loss.
class AgeEstimator {
 public:
  explicit AgeEstimator(Rng& rng);
  Tensor features(const Tensor& image) const;  // [kFeatDim]
  Tensor predict_t(const Tensor& image) const;
  double predict(const Tensor& image) const;
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  nn::ParamSet params_;
  nn::Conv2d c1_, c2_;
  nn::Linear fc1_, head_;
};

struct AgeReport {
  double heldout_mae = 0.0;
  std::vector<double> epoch_loss;
};

// Regression to ground-truth age; throws NumericalError when the held-out
// MAE stays at or above `mae_threshold` after the configured epochs.
AgeReport pretrain_age(AgeEstimator& model, const std::vector<Sample>& train,
                       const std::vector<Sample>& heldout,
                       const TrainConfig& cfg, Rng& rng,
                       double mae_threshold = 0.05);

// Identity embedder trained by classification over a quantized identity
// grid; embed() is the penultimate feature R(.).
class IdEmbedder {
 public:
  explicit IdEmbedder(Rng& rng);
  Tensor embed(const Tensor& image) const;  // [kFeatDim]
  Tensor logits(const Tensor& image) const;
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  static constexpr int kClasses = 64;

 private:
  nn::ParamSet params_;
  nn::Conv2d c1_, c2_;
  nn::Linear fc1_, head_;
};

// Quantization of identity parameters into kClasses cells
// (4 x-offsets, 4 y-offsets, 2 radii, 2 families).
int identity_class(const corpus::Identity& id);

struct IdReport {
  double heldout_top1 = 0.0;
  std::vector<double> epoch_loss;
};

IdReport pretrain_id(IdEmbedder& model, const std::vector<Sample>& train,
                     const std::vector<Sample>& heldout,
                     const TrainConfig& cfg, Rng& rng,
                     double top1_threshold = 0.8);

void export_anchor_csv(const std::filesystem::path& path,
                       const JointEmbedder& model, const corpus::BinSpec& bins);

}  // namespace pada::percep
