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

#include <cstddef>

// Dense inner loops shared by every network. The default entry points are
// OpenMP-parallel over independent output elements, so results do not depend
// on the thread count: each output element is accumulated in one fixed order
// by exactly one thread. kern::ref holds plain serial loops kept as the
// reference implementation for tests and for the kernel benchmark.
namespace pada::kern {

// Global switch consulted by the parallel drivers; forced off automatically
// inside an enclosing omp parallel region (no nesting).
void set_parallel(bool enabled);
bool parallel_enabled();

// c[m,n] = a[m,k] @ b[k,n]
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);
// c[m,n] = a[m,k] @ bt[n,k]^T
void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* bt, double* c);
// c[k,n] = a[m,k]^T @ b[m,n]
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);

// y[co,oh,ow] = conv(x[ci,h,w], w[co,ci,kh,kw]) + bias[co]; zero padding.
void conv2d_fwd(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
                std::size_t kh, std::size_t kw, std::size_t stride,
                std::size_t pad, const double* x, const double* wgt,
                const double* bias, double* y);
// dx[ci,h,w] += is NOT used; dx is overwritten.
void conv2d_dx(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* gy, const double* wgt,
               double* dx);
// dw[co,ci,kh,kw] and db[co] are overwritten.
void conv2d_dw(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* x, const double* gy, double* dw);
void conv2d_db(std::size_t co, std::size_t oh, std::size_t ow,
               const double* gy, double* db);

std::size_t conv_out_dim(std::size_t in, std::size_t k, std::size_t stride,
                         std::size_t pad);

namespace ref {
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);
void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* bt, double* c);
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c);
void conv2d_fwd(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
                std::size_t kh, std::size_t kw, std::size_t stride,
                std::size_t pad, const double* x, const double* wgt,
                const double* bias, double* y);
void conv2d_dx(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* gy, const double* wgt,
               double* dx);
void conv2d_dw(std::size_t ci, std::size_t h, std::size_t w, std::size_t co,
               std::size_t kh, std::size_t kw, std::size_t stride,
               std::size_t pad, const double* x, const double* gy, double* dw);
}  // namespace ref

}  // namespace pada::kern
