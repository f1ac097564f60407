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
#include <fstream>

#include "pada/perception.hpp"
#include "pada/tensor.hpp"

namespace pada::loss {

using num::Tensor;

struct LossWeights {
  double w_age = 1.0;     // ablation hook for the triplet term
  double lambda1 = 0.6;   // directional
  double lambda2 = 0.01;  // text-guided KL
  double lambda3 = 0.2;   // identity
  double lambda4 = 0.01;  // norm
  double lambda5 = 0.1;   // reconstruction
  double margin = 0.15;   // triplet margin
};

// max{cos(f_src, f_tar) - cos(f_ref, f_tar) + m, 0}
Tensor age_triplet(const Tensor& f_src, const Tensor& f_ref,
                   const Tensor& f_tar, double margin);

// 1 - cos(e_img_tar - e_img_src, e_txt_tar - e_txt_src); zero when the text
// direction is degenerate (same anchor).
Tensor directional_loss(const Tensor& e_img_src, const Tensor& e_img_tar,
                        const Tensor& e_txt_src, const Tensor& e_txt_tar);

// -cos(R(x_src), R(x_tar))
Tensor id_loss(const Tensor& x_src, const Tensor& x_tar,
               const percep::IdEmbedder& idnet);

Tensor norm_loss(const Tensor& z_age);                      // ||z_age||^2
Tensor rec_loss(const Tensor& x_src, const Tensor& x_tar);  // sum sq diff

struct LossParts {
  Tensor age, clip, tkl, id, norm, rec;
};

Tensor total_loss(const LossParts& parts, const LossWeights& w);

struct LossBreakdown {
  double age = 0, clip = 0, tkl = 0, id = 0, norm = 0, rec = 0, total = 0;
  LossBreakdown& operator+=(const LossBreakdown& o);
  LossBreakdown scaled(double f) const;
};

// Per-step CSV log: step, each term, total.
class LossCsv {
 public:
  explicit LossCsv(const std::filesystem::path& path);
  void append(std::size_t step, const LossBreakdown& b);

 private:
  std::ofstream os_;
};

}  // namespace pada::loss
