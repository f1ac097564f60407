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

#include <algorithm>
#include <cmath>
#include <utility>

#include "pada/errors.hpp"
#include "pada/kernels.hpp"
#include "pada/tensor.hpp"

namespace pada::num {

namespace {

using BackFn = std::function<void(const TensorNode&, BackwardCtx&)>;

Tensor make_result(Shape shape, std::vector<double> value,
                   std::initializer_list<Tensor> inputs, BackFn fn) {
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  bool tape = false;
  if (grad_enabled()) {
    for (const Tensor& t : inputs) tape = tape || t.on_tape();
  }
  if (tape) {
    n->on_tape = true;
    for (const Tensor& t : inputs) n->parents.push_back(t.ptr());
    n->backward_fn = std::move(fn);
  }
  return Tensor(std::move(n));
}

// Trailing-dimension broadcast: the smaller operand's shape must equal the
// trailing dims of the larger's (size-1 tensors broadcast everywhere).
bool suffix_shape(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  for (std::size_t i = 0; i < small.size(); ++i)
    if (small[small.size() - 1 - i] != big[big.size() - 1 - i]) return false;
  return true;
}

void check_broadcast(const Tensor& a, const Tensor& b, const char* op) {
  const bool ok =
      a.size() == 0 || b.size() == 0 || a.size() == 1 || b.size() == 1 ||
      (a.size() >= b.size() ? suffix_shape(b.shape(), a.shape())
                            : suffix_shape(a.shape(), b.shape()));
  PADA_REQUIRE(ok, std::string(op) + ": shapes do not conform: " +
                       shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

// Reduce a full-size gradient onto a broadcast operand (fixed order).
void reduce_into(const double* g, std::size_t n, double* out,
                 std::size_t out_n) {
  if (out_n == 0) return;
  for (std::size_t i = 0; i < n; ++i) out[i % out_n] += g[i];
}

template <typename F, typename DA, typename DB>
Tensor binary_op(const Tensor& a, const Tensor& b, const char* name, F f,
                 DA dfda, DB dfdb) {
  check_broadcast(a, b, name);
  const bool a_big = a.size() >= b.size();
  const Tensor& big = a_big ? a : b;
  const Tensor& small = a_big ? b : a;
  const std::size_t n = big.size();
  const std::size_t m = std::max<std::size_t>(small.size(), 1);
  std::vector<double> out(n);
  const auto& av = a.data();
  const auto& bv = b.data();
  if (a_big) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i % m]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i % m], bv[i]);
  }
  TensorNode* an = a.node();
  TensorNode* bn = b.node();
  return make_result(
      big.shape(), std::move(out), {a, b},
      [an, bn, a_big, m, dfda, dfdb](const TensorNode& self, BackwardCtx& ctx) {
        const double* g = ctx.grad_of(&self, self.value.size());
        const std::size_t n = self.value.size();
        const auto& av = an->value;
        const auto& bv = bn->value;
        if (an->on_tape) {
          double* ga = ctx.grad_of(an, an->value.size());
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ia = a_big ? i : i % m;
            const std::size_t ib = a_big ? i % m : i;
            ga[ia] += dfda(g[i], av[ia], bv[ib], self.value[i]);
          }
        }
        if (bn->on_tape) {
          double* gb = ctx.grad_of(bn, bn->value.size());
          for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ia = a_big ? i : i % m;
            const std::size_t ib = a_big ? i % m : i;
            gb[ib] += dfdb(g[i], av[ia], bv[ib], self.value[i]);
          }
        }
      });
}

template <typename F, typename D>
Tensor unary_op(const Tensor& a, const char* /*name*/, F f, D dfdx) {
  std::vector<double> out(a.size());
  const auto& av = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
  TensorNode* an = a.node();
  return make_result(a.shape(), std::move(out), {a},
                     [an, dfdx](const TensorNode& self, BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double* g = ctx.grad_of(&self, self.value.size());
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t i = 0; i < self.value.size(); ++i)
                         ga[i] += g[i] * dfdx(an->value[i], self.value[i]);
                     });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double g, double, double, double) { return g; },
      [](double g, double, double, double) { return g; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double g, double, double, double) { return g; },
      [](double g, double, double, double) { return -g; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double g, double, double y, double) { return g * y; },
      [](double g, double x, double, double) { return g * x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  if (strict()) {
    for (double y : b.data())
      PADA_NUMERIC(y != 0.0, "div: division by zero");
  }
  return binary_op(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double g, double, double y, double) { return g / y; },
      [](double g, double x, double y, double) { return -g * x / (y * y); });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary_op(
      a, "add_scalar", [c](double x) { return x + c; },
      [](double, double) { return 1.0; });
}

Tensor scale(const Tensor& a, double c) {
  return unary_op(
      a, "scale", [c](double x) { return c * x; },
      [c](double, double) { return c; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  PADA_REQUIRE(a.rank() >= 1 && b.rank() >= 1,
               "matmul: operands must have rank >= 1");
  const std::size_t k = a.shape().back();
  PADA_REQUIRE(b.shape().front() == k,
               "matmul: contraction mismatch: " + shape_str(a.shape()) +
                   " vs " + shape_str(b.shape()));
  const std::size_t m = a.size() / std::max<std::size_t>(k, 1);
  const std::size_t n = b.size() / std::max<std::size_t>(k, 1);
  Shape out_shape(a.shape().begin(), a.shape().end() - 1);
  out_shape.insert(out_shape.end(), b.shape().begin() + 1, b.shape().end());
  std::vector<double> out(m * n);
  kern::gemm_nn(m, k, n, a.data().data(), b.data().data(), out.data());
  TensorNode* an = a.node();
  TensorNode* bn = b.node();
  return make_result(
      std::move(out_shape), std::move(out), {a, b},
      [an, bn, m, k, n](const TensorNode& self, BackwardCtx& ctx) {
        const double* g = ctx.grad_of(&self, self.value.size());
        if (an->on_tape) {
          std::vector<double> da(m * k);
          kern::gemm_nt(m, n, k, g, bn->value.data(), da.data());
          double* ga = ctx.grad_of(an, an->value.size());
          for (std::size_t i = 0; i < da.size(); ++i) ga[i] += da[i];
        }
        if (bn->on_tape) {
          std::vector<double> db(k * n);
          kern::gemm_tn(m, k, n, an->value.data(), g, db.data());
          double* gb = ctx.grad_of(bn, bn->value.size());
          for (std::size_t i = 0; i < db.size(); ++i) gb[i] += db[i];
        }
      });
}

Tensor transpose2d(const Tensor& a) {
  PADA_REQUIRE(a.rank() == 2, "transpose2d: rank-2 tensor required, got " +
                                  shape_str(a.shape()));
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
  TensorNode* an = a.node();
  return make_result({n, m}, std::move(out), {a},
                     [an, m, n](const TensorNode& self, BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double* g = ctx.grad_of(&self, self.value.size());
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t j = 0; j < n; ++j)
                         for (std::size_t i = 0; i < m; ++i)
                           ga[i * n + j] += g[j * m + i];
                     });
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              std::size_t stride, std::size_t pad) {
  PADA_REQUIRE(x.rank() == 3 && w.rank() == 4 && b.rank() == 1,
               "conv2d: expected x[C,H,W], w[Co,Ci,Kh,Kw], b[Co]");
  const std::size_t ci = x.shape()[0], h = x.shape()[1], wdt = x.shape()[2];
  const std::size_t co = w.shape()[0], kh = w.shape()[2], kw = w.shape()[3];
  PADA_REQUIRE(w.shape()[1] == ci,
               "conv2d: channel mismatch: " + shape_str(x.shape()) + " vs " +
                   shape_str(w.shape()));
  PADA_REQUIRE(b.shape()[0] == co, "conv2d: bias size mismatch");
  const std::size_t oh = kern::conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = kern::conv_out_dim(wdt, kw, stride, pad);
  std::vector<double> out(co * oh * ow);
  kern::conv2d_fwd(ci, h, wdt, co, kh, kw, stride, pad, x.data().data(),
                   w.data().data(), b.data().data(), out.data());
  TensorNode* xn = x.node();
  TensorNode* wn = w.node();
  TensorNode* bn = b.node();
  return make_result(
      {co, oh, ow}, std::move(out), {x, w, b},
      [xn, wn, bn, ci, h, wdt, co, kh, kw, stride, pad, oh,
       ow](const TensorNode& self, BackwardCtx& ctx) {
        const double* g = ctx.grad_of(&self, self.value.size());
        if (xn->on_tape) {
          std::vector<double> dx(ci * h * wdt);
          kern::conv2d_dx(ci, h, wdt, co, kh, kw, stride, pad, g,
                          wn->value.data(), dx.data());
          double* gx = ctx.grad_of(xn, xn->value.size());
          for (std::size_t i = 0; i < dx.size(); ++i) gx[i] += dx[i];
        }
        if (wn->on_tape) {
          std::vector<double> dw(co * ci * kh * kw);
          kern::conv2d_dw(ci, h, wdt, co, kh, kw, stride, pad,
                          xn->value.data(), g, dw.data());
          double* gw = ctx.grad_of(wn, wn->value.size());
          for (std::size_t i = 0; i < dw.size(); ++i) gw[i] += dw[i];
        }
        if (bn->on_tape) {
          std::vector<double> db(co);
          kern::conv2d_db(co, oh, ow, g, db.data());
          double* gb = ctx.grad_of(bn, bn->value.size());
          for (std::size_t i = 0; i < co; ++i) gb[i] += db[i];
        }
      });
}

Tensor scale_shift_channels(const Tensor& x, const Tensor& s,
                            const Tensor& b) {
  PADA_REQUIRE(x.rank() == 3 && s.rank() == 1 && b.rank() == 1,
               "scale_shift_channels: expected x[C,H,W], s[C], b[C]");
  const std::size_t c = x.shape()[0];
  const std::size_t hw = x.shape()[1] * x.shape()[2];
  PADA_REQUIRE(s.shape()[0] == c && b.shape()[0] == c,
               "scale_shift_channels: channel mismatch");
  std::vector<double> out(x.size());
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double sc = 1.0 + s.data()[ch];
    const double sh = b.data()[ch];
    const double* xi = x.data().data() + ch * hw;
    double* yo = out.data() + ch * hw;
    for (std::size_t i = 0; i < hw; ++i) yo[i] = xi[i] * sc + sh;
  }
  TensorNode* xn = x.node();
  TensorNode* sn = s.node();
  TensorNode* bn = b.node();
  return make_result(
      x.shape(), std::move(out), {x, s, b},
      [xn, sn, bn, c, hw](const TensorNode& self, BackwardCtx& ctx) {
        const double* g = ctx.grad_of(&self, self.value.size());
        if (xn->on_tape) {
          double* gx = ctx.grad_of(xn, xn->value.size());
          for (std::size_t ch = 0; ch < c; ++ch) {
            const double sc = 1.0 + sn->value[ch];
            for (std::size_t i = 0; i < hw; ++i)
              gx[ch * hw + i] += g[ch * hw + i] * sc;
          }
        }
        if (sn->on_tape) {
          double* gs = ctx.grad_of(sn, sn->value.size());
          for (std::size_t ch = 0; ch < c; ++ch) {
            double acc = 0.0;
            for (std::size_t i = 0; i < hw; ++i)
              acc += g[ch * hw + i] * xn->value[ch * hw + i];
            gs[ch] += acc;
          }
        }
        if (bn->on_tape) {
          double* gb = ctx.grad_of(bn, bn->value.size());
          for (std::size_t ch = 0; ch < c; ++ch) {
            double acc = 0.0;
            for (std::size_t i = 0; i < hw; ++i) acc += g[ch * hw + i];
            gb[ch] += acc;
          }
        }
      });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double x : a.data()) acc += x;
  TensorNode* an = a.node();
  return make_result({}, {acc}, {a},
                     [an](const TensorNode& self, BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double g = ctx.grad_of(&self, 1)[0];
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t i = 0; i < an->value.size(); ++i)
                         ga[i] += g;
                     });
}

Tensor mean(const Tensor& a) {
  PADA_REQUIRE(a.size() > 0, "mean of empty tensor");
  double acc = 0.0;
  for (double x : a.data()) acc += x;
  const double inv = 1.0 / static_cast<double>(a.size());
  TensorNode* an = a.node();
  return make_result({}, {acc * inv}, {a},
                     [an, inv](const TensorNode& self, BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double g = ctx.grad_of(&self, 1)[0] * inv;
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t i = 0; i < an->value.size(); ++i)
                         ga[i] += g;
                     });
}

Tensor var(const Tensor& a) {
  PADA_REQUIRE(a.size() > 0, "var of empty tensor");
  const std::size_t n = a.size();
  double mu = 0.0;
  for (double x : a.data()) mu += x;
  mu /= static_cast<double>(n);
  double acc = 0.0;
  for (double x : a.data()) acc += (x - mu) * (x - mu);
  const double inv = 1.0 / static_cast<double>(n);
  TensorNode* an = a.node();
  return make_result({}, {acc * inv}, {a},
                     [an, mu, inv](const TensorNode& self, BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double g = ctx.grad_of(&self, 1)[0];
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t i = 0; i < an->value.size(); ++i)
                         ga[i] += g * 2.0 * (an->value[i] - mu) * inv;
                     });
}

Tensor exp(const Tensor& a) {
  return unary_op(
      a, "exp", [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  if (strict()) {
    for (double x : a.data())
      PADA_NUMERIC(x > 0.0, "log: non-positive argument in strict mode");
  }
  return unary_op(
      a, "log", [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
  if (strict()) {
    for (double x : a.data())
      PADA_NUMERIC(x >= 0.0, "sqrt: negative argument in strict mode");
  }
  return unary_op(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / (y == 0.0 ? 1e-300 : y); });
}

Tensor relu(const Tensor& a) {
  return unary_op(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(
      a, "sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor silu(const Tensor& a) {
  return unary_op(
      a, "silu",
      [](double x) { return x / (1.0 + std::exp(-x)); },
      [](double x, double) {
        const double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 + x * (1.0 - s));
      });
}

Tensor tanh(const Tensor& a) {
  return unary_op(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor square(const Tensor& a) {
  return unary_op(
      a, "square", [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

Tensor clamp_min(const Tensor& a, double lo) {
  return unary_op(
      a, "clamp_min", [lo](double x) { return x < lo ? lo : x; },
      [lo](double x, double) { return x < lo ? 0.0 : 1.0; });
}

Tensor concat0(std::span<const Tensor> parts) {
  PADA_REQUIRE(!parts.empty(), "concat0 of zero tensors");
  Shape tail(parts[0].shape().begin() + (parts[0].rank() ? 1 : 0),
             parts[0].shape().end());
  std::size_t dim0 = 0;
  for (const Tensor& p : parts) {
    PADA_REQUIRE(p.rank() >= 1, "concat0: rank >= 1 required");
    Shape t(p.shape().begin() + 1, p.shape().end());
    PADA_REQUIRE(t == tail, "concat0: trailing shapes differ: " +
                                shape_str(p.shape()) + " vs first " +
                                shape_str(parts[0].shape()));
    dim0 += p.shape()[0];
  }
  Shape out_shape;
  out_shape.push_back(dim0);
  out_shape.insert(out_shape.end(), tail.begin(), tail.end());
  std::vector<double> out;
  out.reserve(shape_numel(out_shape));
  for (const Tensor& p : parts)
    out.insert(out.end(), p.data().begin(), p.data().end());

  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(out_shape);
  n->value = std::move(out);
  bool tape = false;
  if (grad_enabled())
    for (const Tensor& p : parts) tape = tape || p.on_tape();
  if (tape) {
    n->on_tape = true;
    std::vector<TensorNode*> raw;
    for (const Tensor& p : parts) {
      n->parents.push_back(p.ptr());
      raw.push_back(p.node());
    }
    n->backward_fn = [raw](const TensorNode& self, BackwardCtx& ctx) {
      const double* g = ctx.grad_of(&self, self.value.size());
      std::size_t off = 0;
      for (TensorNode* p : raw) {
        if (p->on_tape) {
          double* gp = ctx.grad_of(p, p->value.size());
          for (std::size_t i = 0; i < p->value.size(); ++i) gp[i] += g[off + i];
        }
        off += p->value.size();
      }
    };
  }
  return Tensor(std::move(n));
}

Tensor slice0(const Tensor& a, std::size_t begin, std::size_t end) {
  PADA_REQUIRE(a.rank() >= 1, "slice0: rank >= 1 required");
  PADA_REQUIRE(begin <= end && end <= a.shape()[0],
               "slice0: range [" + std::to_string(begin) + "," +
                   std::to_string(end) + ") out of bounds for " +
                   shape_str(a.shape()));
  const std::size_t row = a.size() / std::max<std::size_t>(a.shape()[0], 1);
  Shape out_shape = a.shape();
  out_shape[0] = end - begin;
  std::vector<double> out(a.data().begin() + begin * row,
                          a.data().begin() + end * row);
  TensorNode* an = a.node();
  return make_result(std::move(out_shape), std::move(out), {a},
                     [an, begin, row](const TensorNode& self,
                                      BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double* g = ctx.grad_of(&self, self.value.size());
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t i = 0; i < self.value.size(); ++i)
                         ga[begin * row + i] += g[i];
                     });
}

Tensor reshape(const Tensor& a, Shape s) {
  PADA_REQUIRE(shape_numel(s) == a.size(),
               "reshape: cannot view " + shape_str(a.shape()) + " as " +
                   shape_str(s));
  std::vector<double> out = a.data();
  TensorNode* an = a.node();
  return make_result(std::move(s), std::move(out), {a},
                     [an](const TensorNode& self, BackwardCtx& ctx) {
                       if (!an->on_tape) return;
                       const double* g = ctx.grad_of(&self, self.value.size());
                       double* ga = ctx.grad_of(an, an->value.size());
                       for (std::size_t i = 0; i < self.value.size(); ++i)
                         ga[i] += g[i];
                     });
}

Tensor softmax_cross_entropy(const Tensor& logits, std::size_t target) {
  PADA_REQUIRE(logits.rank() == 1, "softmax_cross_entropy: rank-1 logits");
  const std::size_t k = logits.size();
  PADA_REQUIRE(target < k, "softmax_cross_entropy: target out of range");
  double mx = logits.data()[0];
  for (double x : logits.data()) mx = std::max(mx, x);
  double lse = 0.0;
  for (double x : logits.data()) lse += std::exp(x - mx);
  lse = std::log(lse) + mx;
  const double loss = lse - logits.data()[target];
  TensorNode* ln = logits.node();
  return make_result({}, {loss}, {logits},
                     [ln, target, lse](const TensorNode& self,
                                       BackwardCtx& ctx) {
                       if (!ln->on_tape) return;
                       const double g = ctx.grad_of(&self, 1)[0];
                       double* gl = ctx.grad_of(ln, ln->value.size());
                       for (std::size_t i = 0; i < ln->value.size(); ++i) {
                         const double p = std::exp(ln->value[i] - lse);
                         gl[i] += g * (p - (i == target ? 1.0 : 0.0));
                       }
                     });
}

Tensor dot(const Tensor& a, const Tensor& b) { return sum(mul(a, b)); }

Tensor norm2sq(const Tensor& a) { return sum(square(a)); }

Tensor l2norm(const Tensor& a) { return sqrt(norm2sq(a)); }

Tensor normalize(const Tensor& a) {
  Tensor n = l2norm(a);
  PADA_NUMERIC(n.item() > 1e-12, "normalize: zero-norm vector");
  return div(a, n);
}

Tensor cosine(const Tensor& a, const Tensor& b) {
  Tensor na = l2norm(a);
  Tensor nb = l2norm(b);
  PADA_NUMERIC(na.item() > 1e-12 && nb.item() > 1e-12,
               "cosine: zero-norm operand");
  return div(dot(a, b), mul(na, nb));
}

}  // namespace pada::num
