// SPDX-License-Identifier: Apache-2.0
//
// Reference kernels. Every SIMD variant is equivalence-tested against these.

#include "gumbelrec/kernels.hpp"

#include <cmath>

namespace gumbelrec::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; i++) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) y[i] += a * x[i];
}

void scale_scalar(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) x[i] *= a;
}

void add_scalar(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) y[i] += x[i];
}

void relu_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_scalar(const double* pre, const double* dy, double* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) dx[i] = pre[i] > 0.0 ? dy[i] : 0.0;
}

std::size_t argmax_scalar(const double* x, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; i++)
    if (x[i] > x[best]) best = i;
  return best;
}

void gumbel_scalar(const double* u, double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) g[i] = -std::log(-std::log(u[i]));
}

}  // namespace

Ops scalar_ops() {
  return Ops{dot_scalar,  axpy_scalar,      scale_scalar, add_scalar,
             relu_scalar, relu_mask_scalar, argmax_scalar, gumbel_scalar};
}

}  // namespace gumbelrec::kernels::detail
