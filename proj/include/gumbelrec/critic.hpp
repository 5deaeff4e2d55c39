// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gumbelrec/mat.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Two-layer ReLU value net. With action_dim > 0 it evaluates V(s, a) over
// the concatenated pair (TD form); with action_dim == 0 it evaluates V(s)
// (advantage baseline form).
struct CriticParams {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t hidden = 512;

  Mat w1;                  // hidden x (state_dim + action_dim)
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  std::vector<double> b2;  // single output bias

  static CriticParams init(std::size_t state_dim, std::size_t action_dim,
                           std::size_t hidden, Rng& rng);
  CriticParams zeros_like() const;

  template <class F> void visit(F&& f) {
    f(std::string("critic.w1"), w1.data);
    f(std::string("critic.b1"), b1);
    f(std::string("critic.w2"), w2);
    f(std::string("critic.b2"), b2);
  }
  template <class F> void visit(F&& f) const {
    f(std::string("critic.w1"), const_cast<std::vector<double>&>(w1.data));
    f(std::string("critic.b1"), const_cast<std::vector<double>&>(b1));
    f(std::string("critic.w2"), const_cast<std::vector<double>&>(w2));
    f(std::string("critic.b2"), const_cast<std::vector<double>&>(b2));
  }
};

struct CriticTrace {
  std::vector<double> input;
  std::vector<double> pre;
};

// action_emb may be null only when action_dim == 0.
double critic_value(const CriticParams& params, const double* state, const double* action_emb,
                    CriticTrace* trace = nullptr);

// Accumulates d_out * dV/dparams into grad; optional input gradients.
void critic_backward(const CriticParams& params, const CriticTrace& trace, double d_out,
                     CriticParams& grad, double* d_state = nullptr, double* d_action = nullptr);

}  // namespace gumbelrec
