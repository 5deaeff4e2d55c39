// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gumbelrec/mat.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Scores every catalog action against a state with a softplus-positive
// two-layer net, then turns the scores into a Gumbel-softmax action
// distribution. Action embeddings are passed in (shared with the encoder
// item table), so the trainable tensors here are only {w, W, b}.
struct PolicyParams {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t hidden = 512;
  double gamma_a = 0.2;

  std::vector<double> w;  // hidden
  Mat big_w;              // hidden x (state_dim + action_dim)
  std::vector<double> b;  // hidden

  static PolicyParams init(std::size_t state_dim, std::size_t action_dim,
                           std::size_t hidden, double gamma_a, Rng& rng);
  PolicyParams zeros_like() const;

  template <class F> void visit(F&& f) {
    f(std::string("policy.w"), w);
    f(std::string("policy.W"), big_w.data);
    f(std::string("policy.b"), b);
  }
  template <class F> void visit(F&& f) const {
    f(std::string("policy.w"), const_cast<std::vector<double>&>(w));
    f(std::string("policy.W"), const_cast<std::vector<double>&>(big_w.data));
    f(std::string("policy.b"), const_cast<std::vector<double>&>(b));
  }
};

// Forward intermediates for one state against n_actions rows of a table.
struct PolicyTrace {
  Mat inputs;             // n_actions x (state_dim + action_dim)
  Mat pre;                // n_actions x hidden, before relu
  std::vector<double> z;  // raw score per action
  std::vector<double> h;  // softplus(z)
};

// Positive score h = softplus(w . relu(W [s; a] + b)) for one action.
double score_action(const PolicyParams& params, const double* state, const double* action_emb);

// Scores actions table.row(first_row + i) for i in [0, n_actions).
std::vector<double> score_catalog(const PolicyParams& params, const double* state,
                                  const Mat& table, std::size_t first_row,
                                  std::size_t n_actions, PolicyTrace* trace = nullptr);

// softmax((log h + g) / gamma_a) over the catalog.
std::vector<double> policy_distribution(const PolicyParams& params,
                                        const std::vector<double>& state, const Mat& table,
                                        std::size_t first_row, std::size_t n_actions,
                                        const std::vector<double>& noise);

enum class ActMode { sample, top_k };

// sample: hard Gumbel-max over log h + fresh noise (marginal h / sum h).
// top_k: noise-free ranking, descending score, ties broken by ascending id.
std::vector<std::size_t> act(const PolicyParams& params, const std::vector<double>& state,
                             const Mat& table, std::size_t first_row, std::size_t n_actions,
                             ActMode mode, std::size_t k, Rng& rng);

// log pi(action | state) = log h_a - log sum_i h_i from precomputed scores.
double policy_logprob(const std::vector<double>& scores, std::size_t action);

// Accumulates coeff * d log pi(action | state) / d{w, W, b} into grad.
void policy_logprob_backward(const PolicyParams& params, const PolicyTrace& trace,
                             std::size_t action, double coeff, PolicyParams& grad);

}  // namespace gumbelrec
