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

#include "pada/kernels.hpp"

#include <atomic>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pada::kern {

namespace {
std::atomic<bool> g_parallel{true};

bool use_parallel() {
#ifdef _OPENMP
  return g_parallel.load(std::memory_order_relaxed) && !omp_in_parallel();
#else
  return false;
#endif
}

// Single row of C in gemm_nn: c_i = sum_l a[i,l] * b[l,:]. Shared by the
// serial reference and the parallel driver so both accumulate in the same
// order and agree bitwise.
inline void gemm_nn_row(std::size_t i, std::size_t k, std::size_t n,
                        const double* a, const double* b, double* c) {
  double* ci = c + i * n;
  std::memset(ci, 0, n * sizeof(double));
  const double* ai = a + i * k;
  for (std::size_t l = 0; l < k; ++l) {
    const double ail = ai[l];
    const double* bl = b + l * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += ail * bl[j];
  }
}

inline void gemm_nt_row(std::size_t i, std::size_t k, std::size_t n,
                        const double* a, const double* bt, double* c) {
  const double* ai = a + i * k;
  double* ci = c + i * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double* bj = bt + j * k;
    double acc = 0.0;
    for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
    ci[j] = acc;
  }
}

inline void gemm_tn_row(std::size_t l, std::size_t m, std::size_t k,
                        std::size_t n, const double* a, const double* b,
                        double* c) {
  double* cl = c + l * n;
  std::memset(cl, 0, n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    const double ail = a[i * k + l];
    const double* bi = b + i * n;
    for (std::size_t j = 0; j < n; ++j) cl[j] += ail * bi[j];
  }
}

inline void conv_fwd_channel(std::size_t co_idx, std::size_t ci, std::size_t h,
                             std::size_t w, std::size_t kh, std::size_t kw,
                             std::size_t stride, std::size_t pad,
                             const double* x, const double* wgt,
                             const double* bias, double* y, std::size_t oh,
                             std::size_t ow) {
  const long H = static_cast<long>(h), W = static_cast<long>(w);
  double* yo = y + co_idx * oh * ow;
  const double* wco = wgt + co_idx * ci * kh * kw;
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t s = 0; s < ow; ++s) {
      double acc = bias ? bias[co_idx] : 0.0;
      for (std::size_t c = 0; c < ci; ++c) {
        const double* xc = x + c * h * w;
        const double* wc = wco + c * kh * kw;
        for (std::size_t p = 0; p < kh; ++p) {
          const long ih = static_cast<long>(r * stride + p) -
                          static_cast<long>(pad);
          if (ih < 0 || ih >= H) continue;
          for (std::size_t q = 0; q < kw; ++q) {
            const long iw = static_cast<long>(s * stride + q) -
                            static_cast<long>(pad);
            if (iw < 0 || iw >= W) continue;
            acc += xc[ih * W + iw] * wc[p * kw + q];
          }
        }
      }
      yo[r * ow + s] = acc;
    }
  }
}

inline void conv_dx_channel(std::size_t c, std::size_t ci, std::size_t h,
                            std::size_t w, std::size_t co, std::size_t kh,
                            std::size_t kw, std::size_t stride, std::size_t pad,
                            const double* gy, const double* wgt, double* dx,
                            std::size_t oh, std::size_t ow) {
  double* dxc = dx + c * h * w;
  for (std::size_t ih = 0; ih < h; ++ih) {
    for (std::size_t iw = 0; iw < w; ++iw) {
      double acc = 0.0;
      for (std::size_t o = 0; o < co; ++o) {
        const double* go = gy + o * oh * ow;
        const double* wo = wgt + (o * ci + c) * kh * kw;
        for (std::size_t p = 0; p < kh; ++p) {
          const long num_h = static_cast<long>(ih + pad) - static_cast<long>(p);
          if (num_h < 0 || num_h % static_cast<long>(stride) != 0) continue;
          const long r = num_h / static_cast<long>(stride);
          if (r < 0 || r >= static_cast<long>(oh)) continue;
          for (std::size_t q = 0; q < kw; ++q) {
            const long num_w =
                static_cast<long>(iw + pad) - static_cast<long>(q);
            if (num_w < 0 || num_w % static_cast<long>(stride) != 0) continue;
            const long s = num_w / static_cast<long>(stride);
            if (s < 0 || s >= static_cast<long>(ow)) continue;
            acc += go[r * ow + s] * wo[p * kw + q];
          }
        }
      }
      dxc[ih * w + iw] = acc;
    }
  }
}

inline void conv_dw_pair(std::size_t o, std::size_t c, std::size_t ci,
                         std::size_t h, std::size_t w, std::size_t kh,
                         std::size_t kw, std::size_t stride, std::size_t pad,
                         const double* x, const double* gy, double* dw,
                         std::size_t oh, std::size_t ow) {
  const double* xc = x + c * h * w;
  const double* go = gy + o * oh * ow;
  double* dwoc = dw + (o * ci + c) * kh * kw;
  for (std::size_t p = 0; p < kh; ++p) {
    for (std::size_t q = 0; q < kw; ++q) {
      double acc = 0.0;
      for (std::size_t r = 0; r < oh; ++r) {
        const long ih =
            static_cast<long>(r * stride + p) - static_cast<long>(pad);
        if (ih < 0 || ih >= static_cast<long>(h)) continue;
        for (std::size_t s = 0; s < ow; ++s) {
          const long iw =
              static_cast<long>(s * stride + q) - static_cast<long>(pad);
          if (iw < 0 || iw >= static_cast<long>(w)) continue;
          acc += go[r * ow + s] * xc[ih * w + iw];
        }
      }
      dwoc[p * kw + q] = acc;
    }
  }
}

}  // namespace

void set_parallel(bool enabled) {
  g_parallel.store(enabled, std::memory_order_relaxed);
}
bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

std::size_t conv_out_dim(std::size_t in, std::size_t k, std::size_t stride,
                         std::size_t pad) {
  return (in + 2 * pad - k) / stride + 1;
}

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  const bool par = use_parallel() && m >= 2 && m * k * n >= 16384;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i)
    gemm_nn_row(static_cast<std::size_t>(i), k, n, a, b, c);
}

void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* bt, double* c) {
  const bool par = use_parallel() && m >= 2 && m * k * n >= 16384;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i)
    gemm_nt_row(static_cast<std::size_t>(i), k, n, a, bt, c);
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  const bool par = use_parallel() && k >= 2 && m * k * n >= 16384;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t l = 0; l < static_cast<std::ptrdiff_t>(k); ++l)
    gemm_tn_row(static_cast<std::size_t>(l), m, k, n, a, b, c);
}

void conv2d_fwd(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
                std::size_t kh, std::size_t kw, std::size_t stride,
                std::size_t pad, const double* x, const double* wgt,
                const double* bias, double* y) {
  const std::size_t oh = conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = conv_out_dim(w, kw, stride, pad);
  const bool par = use_parallel() && co >= 2;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t o = 0; o < static_cast<std::ptrdiff_t>(co); ++o)
    conv_fwd_channel(static_cast<std::size_t>(o), ci, h, w, kh, kw, stride,
                     pad, x, wgt, bias, y, oh, ow);
}

void conv2d_dx(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* gy, const double* wgt,
               double* dx) {
  const std::size_t oh = conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = conv_out_dim(w, kw, stride, pad);
  const bool par = use_parallel() && ci >= 2;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(ci); ++c)
    conv_dx_channel(static_cast<std::size_t>(c), ci, h, w, co, kh, kw, stride,
                    pad, gy, wgt, dx, oh, ow);
}

void conv2d_dw(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* x, const double* gy, double* dw) {
  const std::size_t oh = conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = conv_out_dim(w, kw, stride, pad);
  const bool par = use_parallel() && co * ci >= 2;
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t oc = 0; oc < static_cast<std::ptrdiff_t>(co * ci); ++oc)
    conv_dw_pair(static_cast<std::size_t>(oc) / ci,
                 static_cast<std::size_t>(oc) % ci, ci, h, w, kh, kw, stride,
                 pad, x, gy, dw, oh, ow);
}

void conv2d_db(std::size_t co, std::size_t oh, std::size_t ow,
               const double* gy, double* db) {
  // Whole-tensor reduction; kept serial so the order is fixed.
  for (std::size_t o = 0; o < co; ++o) {
    double acc = 0.0;
    const double* go = gy + o * oh * ow;
    for (std::size_t i = 0; i < oh * ow; ++i) acc += go[i];
    db[o] = acc;
  }
}

namespace ref {

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) gemm_nn_row(i, k, n, a, b, c);
}
void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* bt, double* c) {
  for (std::size_t i = 0; i < m; ++i) gemm_nt_row(i, k, n, a, bt, c);
}
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c) {
  for (std::size_t l = 0; l < k; ++l) gemm_tn_row(l, m, k, n, a, b, c);
}
void conv2d_fwd(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
                std::size_t kh, std::size_t kw, std::size_t stride,
                std::size_t pad, const double* x, const double* wgt,
                const double* bias, double* y) {
  const std::size_t oh = conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = conv_out_dim(w, kw, stride, pad);
  for (std::size_t o = 0; o < co; ++o)
    conv_fwd_channel(o, ci, h, w, kh, kw, stride, pad, x, wgt, bias, y, oh,
                     ow);
}
void conv2d_dx(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* gy, const double* wgt,
               double* dx) {
  const std::size_t oh = conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = conv_out_dim(w, kw, stride, pad);
  for (std::size_t c = 0; c < ci; ++c)
    conv_dx_channel(c, ci, h, w, co, kh, kw, stride, pad, gy, wgt, dx, oh, ow);
}
void conv2d_dw(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* x, const double* gy, double* dw) {
  const std::size_t oh = conv_out_dim(h, kh, stride, pad);
  const std::size_t ow = conv_out_dim(w, kw, stride, pad);
  for (std::size_t o = 0; o < co; ++o)
    for (std::size_t c = 0; c < ci; ++c)
      conv_dw_pair(o, c, ci, h, w, kh, kw, stride, pad, x, gy, dw, oh, ow);
}

}  // namespace ref

}  // namespace pada::kern
