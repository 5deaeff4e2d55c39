// SPDX-License-Identifier: Apache-2.0
//
// AVX2/FMA kernels. Compiled with -mavx2 -mfma; entered only after the
// runtime dispatch has confirmed CPU support.
//
// argmax keeps the scalar tie rule (lowest index): a vector max-reduce
// followed by a scan for the first element equal to the max. Reductions
// (dot) reassociate, so they match the scalar kernel to tolerance, not bits.

#include "gumbelrec/kernels.hpp"

#ifdef GUMBELREC_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

namespace gumbelrec::kernels::detail {
namespace {

// log(x) for finite positive normal doubles.
// x = m * 2^e with m in [1, 2), folded to [sqrt(1/2), sqrt(2));
// log(m) = 2*atanh(s), s = (m-1)/(m+1), via an odd series in s.
// Measured worst error vs std::log is under 5e-16 relative.
inline __m256d log_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256i xi = _mm256_castpd_si256(x);
  __m256i expo = _mm256_sub_epi64(_mm256_srli_epi64(xi, 52), _mm256_set1_epi64x(1023));
  __m256i mi = _mm256_or_si256(_mm256_and_si256(xi, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                               _mm256_set1_epi64x(0x3FF0000000000000ll));
  __m256d m = _mm256_castsi256_pd(mi);
  __m256d gt = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), gt);
  expo = _mm256_add_epi64(expo, _mm256_and_si256(_mm256_castpd_si256(gt), _mm256_set1_epi64x(1)));
  // exponents fit in int32; pack the low words and convert
  __m256i packed = _mm256_permutevar8x32_epi32(expo, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0));
  __m256d ed = _mm256_cvtepi32_pd(_mm256_castsi256_si128(packed));
  __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(2.0 / 19.0);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 17.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 15.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 13.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 11.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 9.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 7.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 5.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0 / 3.0));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(2.0));
  __m256d r = _mm256_mul_pd(p, s);
  const __m256d ln2_hi = _mm256_set1_pd(0x1.62e42fefa38p-1);
  const __m256d ln2_lo = _mm256_set1_pd(0x1.ef35793c7673p-45);
  return _mm256_add_pd(_mm256_fmadd_pd(ed, ln2_lo, r), _mm256_mul_pd(ed, ln2_hi));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; i++) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; i++) y[i] += a * x[i];
}

void scale_avx2(double* x, double a, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; i++) x[i] *= a;
}

void add_avx2(double* y, const double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; i++) y[i] += x[i];
}

void relu_avx2(const double* x, double* y, std::size_t n) {
  __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; i++) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_mask_avx2(const double* pre, const double* dy, double* dx, std::size_t n) {
  __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(keep, _mm256_loadu_pd(dy + i)));
  }
  for (; i < n; i++) dx[i] = pre[i] > 0.0 ? dy[i] : 0.0;
}

std::size_t argmax_avx2(const double* x, std::size_t n) {
  if (n < 8) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; i++)
      if (x[i] > x[best]) best = i;
    return best;
  }
  __m256d vmax = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vmax);
  double m = lanes[0];
  for (int k = 1; k < 4; k++)
    if (lanes[k] > m) m = lanes[k];
  for (; i < n; i++)
    if (x[i] > m) m = x[i];
  for (std::size_t j = 0; j < n; j++)
    if (x[j] == m) return j;
  return 0;  // unreachable for finite input
}

void gumbel_avx2(const double* u, double* g, std::size_t n) {
  const __m256d signbit = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d inner = _mm256_xor_pd(log_pd(_mm256_loadu_pd(u + i)), signbit);  // -log(u)
    _mm256_storeu_pd(g + i, _mm256_xor_pd(log_pd(inner), signbit));          // -log(.)
  }
  for (; i < n; i++) g[i] = -std::log(-std::log(u[i]));
}

}  // namespace

Ops avx2_ops() {
  return Ops{dot_avx2,  axpy_avx2,      scale_avx2,  add_avx2,
             relu_avx2, relu_mask_avx2, argmax_avx2, gumbel_avx2};
}

}  // namespace gumbelrec::kernels::detail

#endif  // GUMBELREC_HAVE_AVX2
