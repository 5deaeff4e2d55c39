// SPDX-License-Identifier: Apache-2.0
//
// NEON kernels for aarch64. The Gumbel transform stays scalar here; NEON has
// no double-precision log and the transform is not hot enough on ARM targets
// to justify a polynomial port.

#include "gumbelrec/kernels.hpp"

#ifdef GUMBELREC_HAVE_NEON

#include <arm_neon.h>

#include <cmath>

namespace gumbelrec::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; i++) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; i++) y[i] += a * x[i];
}

void scale_neon(double* x, double a, std::size_t n) {
  float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; i++) x[i] *= a;
}

void add_neon(double* y, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; i++) y[i] += x[i];
}

void relu_neon(const double* x, double* y, std::size_t n) {
  float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmaxq_f64(vld1q_f64(x + i), zero));
  for (; i < n; i++) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_neon(const double* pre, const double* dy, double* dx, std::size_t n) {
  float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t keep = vcgtq_f64(vld1q_f64(pre + i), zero);
    float64x2_t v = vreinterpretq_f64_u64(
        vandq_u64(keep, vreinterpretq_u64_f64(vld1q_f64(dy + i))));
    vst1q_f64(dx + i, v);
  }
  for (; i < n; i++) dx[i] = pre[i] > 0.0 ? dy[i] : 0.0;
}

std::size_t argmax_neon(const double* x, std::size_t n) {
  if (n < 4) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; i++)
      if (x[i] > x[best]) best = i;
    return best;
  }
  float64x2_t vmax = vld1q_f64(x);
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) vmax = vmaxq_f64(vmax, vld1q_f64(x + i));
  double m = vmaxvq_f64(vmax);
  for (; i < n; i++)
    if (x[i] > m) m = x[i];
  for (std::size_t j = 0; j < n; j++)
    if (x[j] == m) return j;
  return 0;  // unreachable for finite input
}

void gumbel_neon(const double* u, double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) g[i] = -std::log(-std::log(u[i]));
}

}  // namespace

Ops neon_ops() {
  return Ops{dot_neon,  axpy_neon,      scale_neon,  add_neon,
             relu_neon, relu_mask_neon, argmax_neon, gumbel_neon};
}

}  // namespace gumbelrec::kernels::detail

#endif  // GUMBELREC_HAVE_NEON
