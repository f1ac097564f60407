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

#include "pada/losses.hpp"

#include <cmath>

#include "pada/errors.hpp"

namespace pada::loss {

Tensor age_triplet(const Tensor& f_src, const Tensor& f_ref,
                   const Tensor& f_tar, double margin) {
  Tensor pos = num::cosine(f_src, f_tar);
  Tensor neg = num::cosine(f_ref, f_tar);
  return num::relu(num::add_scalar(num::sub(pos, neg), margin));
}

Tensor directional_loss(const Tensor& e_img_src, const Tensor& e_img_tar,
                        const Tensor& e_txt_src, const Tensor& e_txt_tar) {
  Tensor txt_dir = num::sub(e_txt_tar, e_txt_src);
  {
    double n2 = 0.0;
    for (double v : txt_dir.data()) n2 += v * v;
    if (std::sqrt(n2) < 1e-8) return Tensor::scalar(0.0);
  }
  Tensor img_dir = num::sub(e_img_tar, e_img_src);
  return num::add_scalar(num::neg(num::cosine(img_dir, txt_dir)), 1.0);
}

Tensor id_loss(const Tensor& x_src, const Tensor& x_tar,
               const percep::IdEmbedder& idnet) {
  return num::neg(num::cosine(idnet.embed(x_src), idnet.embed(x_tar)));
}

Tensor norm_loss(const Tensor& z_age) { return num::norm2sq(z_age); }

Tensor rec_loss(const Tensor& x_src, const Tensor& x_tar) {
  return num::norm2sq(num::sub(x_src, x_tar));
}

Tensor total_loss(const LossParts& parts, const LossWeights& w) {
  Tensor t = num::scale(parts.age, w.w_age);
  t = num::add(t, num::scale(parts.clip, w.lambda1));
  t = num::add(t, num::scale(parts.tkl, w.lambda2));
  t = num::add(t, num::scale(parts.id, w.lambda3));
  t = num::add(t, num::scale(parts.norm, w.lambda4));
  t = num::add(t, num::scale(parts.rec, w.lambda5));
  return t;
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  age += o.age;
  clip += o.clip;
  tkl += o.tkl;
  id += o.id;
  norm += o.norm;
  rec += o.rec;
  total += o.total;
  return *this;
}

LossBreakdown LossBreakdown::scaled(double f) const {
  return {age * f, clip * f, tkl * f, id * f, norm * f, rec * f, total * f};
}

LossCsv::LossCsv(const std::filesystem::path& path) : os_(path) {
  if (!os_) throw IoError("loss csv: cannot open " + path.string());
  os_ << "step,age,clip,tkl,id,norm,rec,total\n";
}

void LossCsv::append(std::size_t step, const LossBreakdown& b) {
  os_ << step << "," << b.age << "," << b.clip << "," << b.tkl << "," << b.id
      << "," << b.norm << "," << b.rec << "," << b.total << "\n";
}

}  // namespace pada::loss
