// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

namespace gumbelrec::kernels {

enum class Backend { scalar, avx2, neon };

// Resolved function table; every pointer is valid after dispatch.
struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);  // y += a*x
  void (*scale)(double*, double, std::size_t);                // x *= a
  void (*add)(double*, const double*, std::size_t);           // y += x
  void (*relu)(const double*, double*, std::size_t);          // y = max(x, 0)
  // dx = pre > 0 ? dy : 0
  void (*relu_mask)(const double*, const double*, double*, std::size_t);
  // index of the maximum, lowest index on ties; inputs must be finite
  std::size_t (*argmax)(const double*, std::size_t);
  // g = -log(-log(u)), u in (0,1)
  void (*gumbel_from_uniform)(const double*, double*, std::size_t);
};

const Ops& ops();
Backend active_backend();
std::string_view backend_name();  // name of the active backend
std::string_view backend_name(Backend b);
bool backend_available(Backend b);
// Override autodetection (tests; GUMBELREC_KERNELS=scalar|avx2|neon does the
// same from the environment). Throws std::runtime_error if unavailable.
void force_backend(Backend b);

inline double dot(const double* a, const double* b, std::size_t n) { return ops().dot(a, b, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { ops().axpy(a, x, y, n); }
inline void scale(double* x, double a, std::size_t n) { ops().scale(x, a, n); }
inline void add(double* y, const double* x, std::size_t n) { ops().add(y, x, n); }
inline void relu(const double* x, double* y, std::size_t n) { ops().relu(x, y, n); }
inline void relu_mask(const double* pre, const double* dy, double* dx, std::size_t n) {
  ops().relu_mask(pre, dy, dx, n);
}
inline std::size_t argmax(const double* x, std::size_t n) { return ops().argmax(x, n); }
inline void gumbel_from_uniform(const double* u, double* g, std::size_t n) {
  ops().gumbel_from_uniform(u, g, n);
}

namespace detail {
Ops scalar_ops();
#ifdef GUMBELREC_HAVE_AVX2
Ops avx2_ops();
#endif
#ifdef GUMBELREC_HAVE_NEON
Ops neon_ops();
#endif
}  // namespace detail

}  // namespace gumbelrec::kernels
