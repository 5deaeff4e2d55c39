// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gumbelrec {

inline double logsumexp(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; i++) m = std::max(m, x[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; i++) s += std::exp(x[i] - m);
  return m + std::log(s);
}

inline void softmax(const double* x, double* y, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; i++) m = std::max(m, x[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; i++) {
    y[i] = std::exp(x[i] - m);
    s += y[i];
  }
  double inv = 1.0 / s;
  for (std::size_t i = 0; i < n; i++) y[i] *= inv;
}

inline std::vector<double> softmax(const std::vector<double>& x) {
  std::vector<double> y(x.size());
  softmax(x.data(), y.data(), x.size());
  return y;
}

inline void log_softmax(const double* x, double* y, std::size_t n) {
  double z = logsumexp(x, n);
  for (std::size_t i = 0; i < n; i++) y[i] = x[i] - z;
}

// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace gumbelrec
