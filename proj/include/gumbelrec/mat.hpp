// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gumbelrec/kernels.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Row-major dense matrix of doubles. Deliberately small: the model code only
// needs matvec-style products, outer-product accumulation, and row views.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  void fill_gaussian(Rng& rng, double sigma) {
    for (auto& v : data) v = sigma * rng.normal();
  }
};

// y = W x, W is (m x n), x has n entries, y has m entries.
inline void matvec(const Mat& w, const double* x, double* y) {
  for (std::size_t i = 0; i < w.rows; i++) y[i] = kernels::dot(w.row(i), x, w.cols);
}

// y += W^T d, W is (m x n), d has m entries, y has n entries.
inline void matvec_t_acc(const Mat& w, const double* d, double* y) {
  for (std::size_t i = 0; i < w.rows; i++) kernels::axpy(d[i], w.row(i), y, w.cols);
}

// G += d x^T, G is (m x n), d has m entries, x has n entries.
inline void outer_acc(Mat& g, const double* d, const double* x) {
  for (std::size_t i = 0; i < g.rows; i++) kernels::axpy(d[i], x, g.row(i), g.cols);
}

// C = A B, shapes (n x m)(m x p). Row-major accumulation over A's columns.
inline Mat matmul(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; i++) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t k = 0; k < a.cols; k++) kernels::axpy(arow[k], b.row(k), crow, b.cols);
  }
  return c;
}

// C = A B^T, shapes (n x m)(p x m).
inline Mat matmul_abt(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; i++)
    for (std::size_t j = 0; j < b.rows; j++)
      c.at(i, j) = kernels::dot(a.row(i), b.row(j), a.cols);
  return c;
}

// C += A^T B, shapes (n x m)(n x p) -> (m x p).
inline void matmul_atb_acc(const Mat& a, const Mat& b, Mat& c) {
  for (std::size_t i = 0; i < a.rows; i++) {
    const double* arow = a.row(i);
    const double* brow = b.row(i);
    for (std::size_t k = 0; k < a.cols; k++) kernels::axpy(arow[k], brow, c.row(k), b.cols);
  }
}

inline void colsum_acc(const Mat& a, double* out) {
  for (std::size_t i = 0; i < a.rows; i++) kernels::add(out, a.row(i), a.cols);
}

}  // namespace gumbelrec
