// SPDX-License-Identifier: Apache-2.0
//
// Shared Gumbel sampling helpers. A categorical with probabilities p can be
// sampled as argmax_i(log p_i + g_i) with g_i standard Gumbel; dividing the
// perturbed logits by a temperature and taking a softmax instead gives the
// differentiable relaxation used during training.

#pragma once

#include <cstddef>
#include <vector>

#include "gumbelrec/kernels.hpp"
#include "gumbelrec/numeric.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Fills g with standard Gumbel(0,1) noise: g = -log(-log u), u uniform (0,1).
inline void sample_gumbel(Rng& rng, double* g, std::size_t n) {
  for (std::size_t i = 0; i < n; i++) g[i] = rng.uniform();
  kernels::gumbel_from_uniform(g, g, n);
}

inline std::vector<double> sample_gumbel(Rng& rng, std::size_t n) {
  std::vector<double> g(n);
  sample_gumbel(rng, g.data(), n);
  return g;
}

inline std::size_t gumbel_argmax(const double* logits, const double* g, std::size_t n,
                                 double* perturbed_scratch) {
  for (std::size_t i = 0; i < n; i++) perturbed_scratch[i] = logits[i] + g[i];
  return kernels::argmax(perturbed_scratch, n);
}

inline std::size_t gumbel_argmax(const std::vector<double>& logits, const std::vector<double>& g) {
  std::vector<double> scratch(logits.size());
  return gumbel_argmax(logits.data(), g.data(), logits.size(), scratch.data());
}

// y = softmax((logits + g) / temperature)
inline void gumbel_softmax(const double* logits, const double* g, double temperature, double* y,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; i++) y[i] = (logits[i] + g[i]) / temperature;
  softmax(y, y, n);
}

inline std::vector<double> gumbel_softmax(const std::vector<double>& logits,
                                          const std::vector<double>& g, double temperature) {
  std::vector<double> y(logits.size());
  gumbel_softmax(logits.data(), g.data(), temperature, y.data(), logits.size());
  return y;
}

}  // namespace gumbelrec
