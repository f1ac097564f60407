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

#include "pada/diffusion.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "pada/errors.hpp"
#include "pada/trainer.hpp"

namespace pada::diff {

using num::Shape;

NoiseSchedule make_schedule(std::size_t T, ScheduleKind kind, double beta_min,
                            double beta_max) {
  PADA_REQUIRE(T >= 1, "make_schedule: T must be >= 1");
  PADA_REQUIRE(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0,
               "make_schedule: need 0 < beta_min <= beta_max < 1");
  NoiseSchedule s;
  s.T = T;
  s.kind = kind;
  s.beta_min = beta_min;
  s.beta_max = beta_max;
  s.alpha.resize(T);
  s.alpha_bar.resize(T);
  if (kind == ScheduleKind::Linear) {
    for (std::size_t t = 0; t < T; ++t) {
      const double frac =
          T == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(T - 1);
      const double beta = beta_min + (beta_max - beta_min) * frac;
      s.alpha[t] = 1.0 - beta;
    }
  } else {
    // Squared-cosine cumulative profile, converted to per-step alphas with
    // the usual cap on beta.
    const double off = 0.008;
    auto f = [off, T](double t) {
      const double v =
          std::cos((t / static_cast<double>(T) + off) / (1.0 + off) *
                   std::numbers::pi / 2.0);
      return v * v;
    };
    double prev = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double cur = f(static_cast<double>(t + 1)) / f(0.0);
      double beta = 1.0 - cur / prev;
      beta = std::min(beta, 0.999);
      s.alpha[t] = 1.0 - beta;
      prev = cur;
    }
  }
  double run = 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    run *= s.alpha[t];
    s.alpha_bar[t] = run;
  }
  return s;
}

void save_schedule(const std::filesystem::path& path, const NoiseSchedule& s) {
  nlohmann::json j{{"T", s.T},
                   {"kind", s.kind == ScheduleKind::Linear ? "linear"
                                                           : "cosine"},
                   {"beta_min", s.beta_min},
                   {"beta_max", s.beta_max}};
  std::ofstream os(path);
  if (!os) throw IoError("save_schedule: cannot open " + path.string());
  os << j.dump(2) << "\n";
}

NoiseSchedule load_schedule(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("load_schedule: cannot open " + path.string());
  nlohmann::json j;
  is >> j;
  return make_schedule(
      j.at("T").get<std::size_t>(),
      j.at("kind").get<std::string>() == "linear" ? ScheduleKind::Linear
                                                  : ScheduleKind::Cosine,
      j.at("beta_min").get<double>(), j.at("beta_max").get<double>());
}

QSample q_sample(const Tensor& x0, long t, const NoiseSchedule& sched,
                 Rng& rng) {
  PADA_REQUIRE(t >= 0 && t < static_cast<long>(sched.T),
               "q_sample: t=" + std::to_string(t) + " outside [0," +
                   std::to_string(sched.T) + ")");
  QSample out;
  out.eps = num::gaussian(rng, x0.shape());
  const double sa = std::sqrt(sched.abar(t));
  const double sn = std::sqrt(1.0 - sched.abar(t));
  out.x_t = num::add(num::scale(x0, sa), num::scale(out.eps, sn));
  return out;
}

Tensor time_embedding(long t, std::size_t dim) {
  PADA_REQUIRE(dim % 2 == 0, "time_embedding: dim must be even");
  Tensor e = Tensor::zeros({dim});
  const std::size_t half = dim / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double freq = std::exp(
        -std::log(10000.0) * static_cast<double>(i) /
        static_cast<double>(half));
    e.raw()[i] = std::sin(static_cast<double>(t) * freq);
    e.raw()[half + i] = std::cos(static_cast<double>(t) * freq);
  }
  return e;
}

Denoiser::Denoiser(const DenoiserConfig& cfg, Rng& rng) : cfg_(cfg) {
  const std::size_t c = cfg.channels;
  c1_ = nn::Conv2d::make(params_, "den.conv1", 1, c, 3, 1, 1, rng);
  c2_ = nn::Conv2d::make(params_, "den.conv2", c, c, 3, 1, 1, rng);
  c3_ = nn::Conv2d::make(params_, "den.conv3", c, c, 3, 1, 1, rng);
  c4_ = nn::Conv2d::make(params_, "den.conv4", c, 1, 3, 1, 1, rng);
  const std::size_t cond = cfg.temb_dim + cfg.z_dim;
  film1_ = nn::Linear::make(params_, "den.film1", cond, 2 * c, rng, 0.1);
  film2_ = nn::Linear::make(params_, "den.film2", cond, 2 * c, rng, 0.1);
  film3_ = nn::Linear::make(params_, "den.film3", cond, 2 * c, rng, 0.1);
}

Tensor Denoiser::forward(const Tensor& x_t, long t, const Tensor& z) const {
  PADA_REQUIRE(z.size() == cfg_.z_dim,
               "denoiser: z has size " + std::to_string(z.size()) +
                   ", expected " + std::to_string(cfg_.z_dim));
  Tensor temb = time_embedding(t, cfg_.temb_dim);
  std::vector<Tensor> parts{temb, z};
  Tensor cond = num::concat0(parts);
  const std::size_t c = cfg_.channels;
  auto film = [&](const nn::Linear& l, const Tensor& h) {
    Tensor sb = l(cond);
    Tensor s = num::slice0(sb, 0, c);
    Tensor b = num::slice0(sb, c, 2 * c);
    return num::scale_shift_channels(h, s, b);
  };
  Tensor h = num::silu(film(film1_, c1_(x_t)));
  h = num::silu(film(film2_, c2_(h)));
  h = num::silu(film(film3_, c3_(h)));
  return c4_(h);
}

SemanticEncoder::SemanticEncoder(std::size_t z_dim, std::size_t image_hw,
                                 Rng& rng)
    : z_dim_(z_dim), hw_(image_hw) {
  e1_ = nn::Conv2d::make(params_, "sem.conv1", 1, 16, 3, 2, 1, rng);
  e2_ = nn::Conv2d::make(params_, "sem.conv2", 16, 32, 3, 2, 1, rng);
  const std::size_t q = hw_ / 4;
  head_ = nn::Linear::make(params_, "sem.head", 32 * q * q, z_dim, rng);
}

Tensor SemanticEncoder::encode(const Tensor& x0) const {
  Tensor h = num::silu(e1_(x0));
  h = num::silu(e2_(h));
  return head_(num::reshape(h, {h.size()}));
}

Tensor predict_x0(const Tensor& x_t, long t, const Tensor& z,
                  const NoiseSchedule& sched, const Denoiser& den) {
  PADA_REQUIRE(t >= 0 && t < static_cast<long>(sched.T),
               "predict_x0: t out of range");
  Tensor eps = den.forward(x_t, t, z);
  const double sa = std::sqrt(sched.abar(t));
  const double sn = std::sqrt(1.0 - sched.abar(t));
  return num::scale(num::sub(x_t, num::scale(eps, sn)), 1.0 / sa);
}

Tensor ddim_step(const Tensor& x_t, long t, long t_prev, const Tensor& z,
                 const NoiseSchedule& sched, const Denoiser& den) {
  PADA_REQUIRE(t >= 0 && t < static_cast<long>(sched.T),
               "ddim_step: t out of range");
  PADA_REQUIRE(t_prev < t, "ddim_step: t_prev must be < t");
  Tensor eps = den.forward(x_t, t, z);
  const double sa = std::sqrt(sched.abar(t));
  const double sn = std::sqrt(1.0 - sched.abar(t));
  Tensor x0 = num::scale(num::sub(x_t, num::scale(eps, sn)), 1.0 / sa);
  const double pa = std::sqrt(sched.abar(t_prev));
  const double pn = std::sqrt(1.0 - sched.abar(t_prev));
  return num::add(num::scale(x0, pa), num::scale(eps, pn));
}

std::vector<long> stride_plan(std::size_t T, std::size_t steps) {
  PADA_REQUIRE(steps >= 1, "stride_plan: steps must be >= 1");
  PADA_REQUIRE(steps <= T, "stride_plan: steps must be <= T");
  std::vector<long> plan;
  if (steps == 1) {
    plan.push_back(static_cast<long>(T) - 1);
    return plan;
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(T - 1) /
                       static_cast<double>(steps - 1);
    const long t = std::lround(pos);
    if (plan.empty() || plan.back() != t) plan.push_back(t);
  }
  return plan;
}

Tensor ddim_sample(const Tensor& x_T, const Tensor& z,
                   const NoiseSchedule& sched, const Denoiser& den,
                   std::size_t steps) {
  const auto plan = stride_plan(sched.T, steps);
  Tensor x = x_T;
  for (std::size_t k = plan.size(); k-- > 1;)
    x = ddim_step(x, plan[k], plan[k - 1], z, sched, den);
  // Final hop to the clean image (alpha_bar = 1).
  return ddim_step(x, plan[0], -1, z, sched, den);
}

Tensor ddim_invert(const Tensor& x0, const Tensor& z,
                   const NoiseSchedule& sched, const Denoiser& den,
                   std::size_t steps) {
  const auto plan = stride_plan(sched.T, steps);
  Tensor x = x0;
  for (std::size_t k = 0; k + 1 < plan.size(); ++k) {
    const long t = plan[k], t_next = plan[k + 1];
    Tensor eps = den.forward(x, t, z);
    const double sa = std::sqrt(sched.abar(t));
    const double sn = std::sqrt(1.0 - sched.abar(t));
    Tensor pred = num::scale(num::sub(x, num::scale(eps, sn)), 1.0 / sa);
    const double na = std::sqrt(sched.abar(t_next));
    const double nn_ = std::sqrt(1.0 - sched.abar(t_next));
    x = num::add(num::scale(pred, na), num::scale(eps, nn_));
  }
  return x;
}

double PretrainHistory::drop_fraction() const {
  if (epoch_loss.size() < 2) return 0.0;
  const double first = epoch_loss.front();
  const double last = epoch_loss.back();
  if (first <= 0.0) return 0.0;
  return (first - last) / first;
}

PretrainHistory pretrain_diffae(
    const std::vector<corpus::Sample>& data, const NoiseSchedule& sched,
    Denoiser& den, SemanticEncoder& enc, const DiffaeConfig& cfg, Rng& rng,
    const std::function<void(std::size_t, double)>& on_epoch) {
  PADA_REQUIRE(!data.empty(), "pretrain_diffae: empty corpus");
  nn::Adam opt({&den.params(), &enc.params()}, cfg.lr);
  PretrainHistory hist;
  std::size_t global_step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.fork(0x0E50C000ull + epoch);
    auto order = nn::shuffled_indices(data.size(), erng);
    double epoch_sum = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t off = 0; off < order.size(); off += cfg.batch) {
      const std::size_t bsz = std::min(cfg.batch, order.size() - off);
      Rng srng = rng.fork(0x57EB0000ull + global_step);
      auto loss_fn = [&](std::size_t i) {
        Rng r = srng.fork(i);
        const corpus::Sample& smp = data[order[off + i]];
        const long t = static_cast<long>(r.next_u64() % sched.T);
        QSample q = q_sample(smp.image, t, sched, r);
        Tensor z = enc.encode(smp.image);
        Tensor eps_hat = den.forward(q.x_t, t, z);
        return num::scale(num::mean(num::square(num::sub(eps_hat, q.eps))),
                          1.0 / static_cast<double>(bsz));
      };
      auto losses =
          nn::batch_backward(bsz, loss_fn, {&den.params(), &enc.params()});
      double step_loss = 0.0;
      for (double l : losses) step_loss += l;
      PADA_NUMERIC(std::isfinite(step_loss),
                   "pretrain_diffae: diverged (non-finite loss) at epoch " +
                       std::to_string(epoch) + " step " +
                       std::to_string(global_step));
      opt.step();
      epoch_sum += step_loss;
      ++epoch_count;
      ++global_step;
    }
    hist.epoch_loss.push_back(epoch_sum / static_cast<double>(epoch_count));
    if (on_epoch) on_epoch(epoch, hist.epoch_loss.back());
  }
  return hist;
}

}  // namespace pada::diff
