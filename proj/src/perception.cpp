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

#include "pada/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pada/errors.hpp"
#include "pada/trainer.hpp"

namespace pada::percep {

namespace {
constexpr double kTemperature = 0.07;

double vec_cos(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::max(1e-300, std::sqrt(aa) * std::sqrt(bb));
}
}  // namespace

JointEmbedder::JointEmbedder(Rng& rng) {
  c1_ = nn::Conv2d::make(params_, "joint.conv1", 1, 12, 3, 2, 1, rng);
  c2_ = nn::Conv2d::make(params_, "joint.conv2", 12, 24, 3, 2, 1, rng);
  const std::size_t q = corpus::kH / 4;
  head_ = nn::Linear::make(params_, "joint.head", 24 * q * q, kEmbedDim, rng);
  anchors_ = params_.add("joint.anchors",
                         nn::gaussian_init(rng, {corpus::kAnchors, kEmbedDim},
                                           1.0));
}

Tensor JointEmbedder::penultimate(const Tensor& image) const {
  Tensor h = num::silu(c1_(image));
  h = num::silu(c2_(h));
  return num::reshape(h, {h.size()});
}

Tensor JointEmbedder::embed_image(const Tensor& image) const {
  return num::normalize(head_(penultimate(image)));
}

Tensor JointEmbedder::embed_anchor(int anchor_id) const {
  PADA_REQUIRE(anchor_id >= 0 && anchor_id < corpus::kAnchors,
               "embed_anchor: unknown anchor id " + std::to_string(anchor_id));
  return num::normalize(num::reshape(
      num::slice0(anchors_, anchor_id, anchor_id + 1), {kEmbedDim}));
}

Tensor JointEmbedder::anchor_matrix() const {
  std::vector<Tensor> rows;
  rows.reserve(corpus::kAnchors);
  for (int a = 0; a < corpus::kAnchors; ++a)
    rows.push_back(num::reshape(embed_anchor(a), {1, kEmbedDim}));
  return num::concat0(rows);
}

JointReport pretrain_joint(JointEmbedder& model,
                           const std::vector<Sample>& train,
                           const std::vector<Sample>& heldout,
                           const TrainConfig& cfg, Rng& rng) {
  PADA_REQUIRE(!train.empty(), "pretrain_joint: empty corpus");
  nn::Adam opt({&model.params()}, cfg.lr);
  JointReport report;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.fork(0x10A7000ull + epoch);
    auto order = nn::shuffled_indices(train.size(), erng);
    double epoch_sum = 0.0;
    std::size_t epoch_batches = 0;
    for (std::size_t off = 0; off < order.size(); off += cfg.batch) {
      const std::size_t bsz = std::min(cfg.batch, order.size() - off);
      if (bsz < 2) break;
      // One tape per batch: the symmetric objective couples the samples.
      std::vector<Tensor> rows;
      std::vector<std::size_t> labels;
      rows.reserve(bsz);
      for (std::size_t i = 0; i < bsz; ++i) {
        const Sample& s = train[order[off + i]];
        rows.push_back(
            num::reshape(model.embed_image(s.image), {1, kEmbedDim}));
        labels.push_back(static_cast<std::size_t>(s.anchor));
      }
      Tensor emb = num::concat0(rows);                       // [B, De]
      Tensor sim = num::scale(
          num::matmul(emb, num::transpose2d(model.anchor_matrix())),
          1.0 / kTemperature);                               // [B, A]
      Tensor sim_t = num::transpose2d(sim);                  // [A, B]
      Tensor loss = Tensor::scalar(0.0);
      for (std::size_t i = 0; i < bsz; ++i) {
        Tensor row =
            num::reshape(num::slice0(sim, i, i + 1), {corpus::kAnchors});
        Tensor col = num::reshape(
            num::slice0(sim_t, labels[i], labels[i] + 1), {bsz});
        loss = num::add(loss, num::add(
                                  num::softmax_cross_entropy(row, labels[i]),
                                  num::softmax_cross_entropy(col, i)));
      }
      loss = num::scale(loss, 0.5 / static_cast<double>(bsz));
      PADA_NUMERIC(std::isfinite(loss.item()),
                   "pretrain_joint: non-finite loss at step " +
                       std::to_string(global_step));
      num::backward(loss);
      opt.step();
      epoch_sum += loss.item();
      ++epoch_batches;
      ++global_step;
    }
    report.epoch_loss.push_back(epoch_sum / std::max<std::size_t>(1, epoch_batches));
  }

  // Collapse check: anchors must not have merged into one direction.
  {
    num::NoGradGuard ng;
    bool all_close = true;
    for (int a = 0; a < corpus::kAnchors && all_close; ++a)
      for (int b = a + 1; b < corpus::kAnchors; ++b) {
        const double c = vec_cos(model.embed_anchor(a).data(),
                                 model.embed_anchor(b).data());
        if (c <= 0.99) {
          all_close = false;
          break;
        }
      }
    PADA_NUMERIC(!all_close, "pretrain_joint: anchor collapse");
  }

  // Held-out retrieval and margin statistics.
  {
    num::NoGradGuard ng;
    std::vector<std::vector<double>> anchors;
    for (int a = 0; a < corpus::kAnchors; ++a)
      anchors.push_back(model.embed_anchor(a).data());
    std::size_t hits = 0;
    double own_sum = 0.0, other_best_sum = 0.0;
    std::vector<std::vector<std::size_t>> by_anchor(corpus::kAnchors);
    std::vector<std::vector<double>> embeds(heldout.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(heldout.size());
         ++i)
      embeds[i] = model.embed_image(heldout[i].image).data();
    for (std::size_t i = 0; i < heldout.size(); ++i) {
      const auto& e = embeds[i];
      int best = -1;
      double best_cos = -2.0, own = -2.0, other = -2.0;
      for (int a = 0; a < corpus::kAnchors; ++a) {
        const double c = vec_cos(e, anchors[a]);
        if (c > best_cos) {
          best_cos = c;
          best = a;
        }
        if (a == heldout[i].anchor)
          own = c;
        else
          other = std::max(other, c);
      }
      hits += best == heldout[i].anchor;
      own_sum += own;
      other_best_sum += other;
      by_anchor[heldout[i].anchor].push_back(i);
    }
    report.retrieval_accuracy =
        heldout.empty() ? 0.0
                        : static_cast<double>(hits) /
                              static_cast<double>(heldout.size());
    report.own_anchor_margin =
        heldout.empty() ? 0.0
                        : (own_sum - other_best_sum) /
                              static_cast<double>(heldout.size());
    // Within-anchor spread (one-to-many premise): mean pairwise cosine of
    // image embeddings sharing an anchor.
    double cos_sum = 0.0;
    std::size_t cos_n = 0;
    for (const auto& grp : by_anchor) {
      for (std::size_t i = 0; i + 1 < grp.size() && i < 8; ++i)
        for (std::size_t j = i + 1; j < grp.size() && j < 9; ++j) {
          cos_sum += vec_cos(embeds[grp[i]], embeds[grp[j]]);
          ++cos_n;
        }
    }
    report.mean_within_bin_cos = cos_n ? cos_sum / cos_n : 1.0;
  }
  return report;
}

AgeEstimator::AgeEstimator(Rng& rng) {
  c1_ = nn::Conv2d::make(params_, "age.conv1", 1, 8, 3, 2, 1, rng);
  c2_ = nn::Conv2d::make(params_, "age.conv2", 8, 16, 3, 2, 1, rng);
  const std::size_t q = corpus::kH / 4;
  fc1_ = nn::Linear::make(params_, "age.fc1", 16 * q * q, kFeatDim, rng);
  head_ = nn::Linear::make(params_, "age.head", kFeatDim, 1, rng);
}

Tensor AgeEstimator::features(const Tensor& image) const {
  Tensor h = num::silu(c1_(image));
  h = num::silu(c2_(h));
  return num::silu(fc1_(num::reshape(h, {h.size()})));
}

Tensor AgeEstimator::predict_t(const Tensor& image) const {
  return num::reshape(head_(features(image)), {});
}

double AgeEstimator::predict(const Tensor& image) const {
  num::NoGradGuard ng;
  return predict_t(image).item();
}

AgeReport pretrain_age(AgeEstimator& model, const std::vector<Sample>& train,
                       const std::vector<Sample>& heldout,
                       const TrainConfig& cfg, Rng& rng, double mae_threshold) {
  PADA_REQUIRE(!train.empty(), "pretrain_age: empty corpus");
  nn::Adam opt({&model.params()}, cfg.lr);
  AgeReport report;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.fork(0xA0E000ull + epoch);
    auto order = nn::shuffled_indices(train.size(), erng);
    double epoch_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t off = 0; off < order.size(); off += cfg.batch) {
      const std::size_t bsz = std::min(cfg.batch, order.size() - off);
      auto loss_fn = [&](std::size_t i) {
        const Sample& s = train[order[off + i]];
        Tensor err = num::sub(model.predict_t(s.image),
                              Tensor::scalar(s.age));
        return num::scale(num::square(err), 1.0 / static_cast<double>(bsz));
      };
      auto losses = nn::batch_backward(bsz, loss_fn, {&model.params()});
      double step_loss = 0.0;
      for (double l : losses) step_loss += l;
      PADA_NUMERIC(std::isfinite(step_loss),
                   "pretrain_age: non-finite loss at step " +
                       std::to_string(global_step));
      opt.step();
      epoch_sum += step_loss;
      ++batches;
      ++global_step;
    }
    report.epoch_loss.push_back(epoch_sum / std::max<std::size_t>(1, batches));
  }
  {
    num::NoGradGuard ng;
    double mae = 0.0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : mae)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(heldout.size());
         ++i)
      mae += std::abs(model.predict(heldout[i].image) - heldout[i].age);
    report.heldout_mae =
        heldout.empty() ? 1.0 : mae / static_cast<double>(heldout.size());
  }
  PADA_NUMERIC(report.heldout_mae < mae_threshold,
               "pretrain_age: held-out MAE " +
                   std::to_string(report.heldout_mae) +
                   " did not reach threshold " +
                   std::to_string(mae_threshold));
  return report;
}

IdEmbedder::IdEmbedder(Rng& rng) {
  c1_ = nn::Conv2d::make(params_, "id.conv1", 1, 8, 3, 2, 1, rng);
  c2_ = nn::Conv2d::make(params_, "id.conv2", 8, 16, 3, 2, 1, rng);
  const std::size_t q = corpus::kH / 4;
  fc1_ = nn::Linear::make(params_, "id.fc1", 16 * q * q, kFeatDim, rng);
  head_ = nn::Linear::make(params_, "id.head", kFeatDim, kClasses, rng);
}

Tensor IdEmbedder::embed(const Tensor& image) const {
  Tensor h = num::silu(c1_(image));
  h = num::silu(c2_(h));
  return num::silu(fc1_(num::reshape(h, {h.size()})));
}

Tensor IdEmbedder::logits(const Tensor& image) const {
  return head_(embed(image));
}

int identity_class(const corpus::Identity& id) {
  auto quant = [](double v, double lo, double hi, int levels) {
    const double t = (v - lo) / (hi - lo);
    int q = static_cast<int>(t * levels);
    return std::clamp(q, 0, levels - 1);
  };
  const int qx = quant(id.cx, -0.2, 0.2, 4);
  const int qy = quant(id.cy, -0.2, 0.2, 4);
  const int qr = quant(id.r0, 0.28, 0.38, 2);
  return ((qx * 4 + qy) * 2 + qr) * 2 + id.family;
}

IdReport pretrain_id(IdEmbedder& model, const std::vector<Sample>& train,
                     const std::vector<Sample>& heldout,
                     const TrainConfig& cfg, Rng& rng, double top1_threshold) {
  PADA_REQUIRE(!train.empty(), "pretrain_id: empty corpus");
  nn::Adam opt({&model.params()}, cfg.lr);
  IdReport report;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.fork(0x1D000ull + epoch);
    auto order = nn::shuffled_indices(train.size(), erng);
    double epoch_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t off = 0; off < order.size(); off += cfg.batch) {
      const std::size_t bsz = std::min(cfg.batch, order.size() - off);
      auto loss_fn = [&](std::size_t i) {
        const Sample& s = train[order[off + i]];
        const auto cls = static_cast<std::size_t>(identity_class(s.identity));
        return num::scale(
            num::softmax_cross_entropy(model.logits(s.image), cls),
            1.0 / static_cast<double>(bsz));
      };
      auto losses = nn::batch_backward(bsz, loss_fn, {&model.params()});
      double step_loss = 0.0;
      for (double l : losses) step_loss += l;
      PADA_NUMERIC(std::isfinite(step_loss),
                   "pretrain_id: non-finite loss at step " +
                       std::to_string(global_step));
      opt.step();
      epoch_sum += step_loss;
      ++batches;
      ++global_step;
    }
    report.epoch_loss.push_back(epoch_sum / std::max<std::size_t>(1, batches));
  }
  {
    num::NoGradGuard ng;
    std::size_t hits = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : hits)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(heldout.size());
         ++i) {
      const auto lg = model.logits(heldout[i].image).data();
      const std::size_t best =
          std::distance(lg.begin(), std::max_element(lg.begin(), lg.end()));
      hits += best ==
              static_cast<std::size_t>(identity_class(heldout[i].identity));
    }
    report.heldout_top1 =
        heldout.empty() ? 0.0
                        : static_cast<double>(hits) /
                              static_cast<double>(heldout.size());
  }
  PADA_NUMERIC(report.heldout_top1 > top1_threshold,
               "pretrain_id: held-out top-1 " +
                   std::to_string(report.heldout_top1) +
                   " did not reach threshold " +
                   std::to_string(top1_threshold));
  return report;
}

void export_anchor_csv(const std::filesystem::path& path,
                       const JointEmbedder& model,
                       const corpus::BinSpec& bins) {
  num::NoGradGuard ng;
  std::ofstream os(path);
  if (!os) throw IoError("export_anchor_csv: cannot open " + path.string());
  os << "anchor_id,text";
  for (std::size_t d = 0; d < kEmbedDim; ++d) os << ",e" << d;
  os << "\n";
  for (int a = 0; a < corpus::kAnchors; ++a) {
    os << a << "," << bins.anchor_texts[a];
    for (double v : model.embed_anchor(a).data()) os << "," << v;
    os << "\n";
  }
}

}  // namespace pada::percep
