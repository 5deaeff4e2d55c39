// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/critic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gumbelrec/kernels.hpp"

namespace gumbelrec {

CriticParams CriticParams::init(std::size_t state_dim, std::size_t action_dim,
                                std::size_t hidden, Rng& rng) {
  if (state_dim == 0 || hidden == 0)
    throw std::invalid_argument("critic dimensions must be positive");
  CriticParams c;
  c.state_dim = state_dim;
  c.action_dim = action_dim;
  c.hidden = hidden;
  const std::size_t in = state_dim + action_dim;
  c.w1 = Mat(hidden, in);
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (auto& v : c.w1.data) v = (2.0 * rng.uniform() - 1.0) * bound;
  c.b1.assign(hidden, 0.0);
  c.w2.resize(hidden);
  bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& v : c.w2) v = (2.0 * rng.uniform() - 1.0) * bound;
  c.b2.assign(1, 0.0);
  return c;
}

CriticParams CriticParams::zeros_like() const {
  CriticParams g = *this;
  g.w1.zero();
  std::fill(g.b1.begin(), g.b1.end(), 0.0);
  std::fill(g.w2.begin(), g.w2.end(), 0.0);
  g.b2.assign(1, 0.0);
  return g;
}

double critic_value(const CriticParams& params, const double* state, const double* action_emb,
                    CriticTrace* trace) {
  if (params.action_dim > 0 && action_emb == nullptr)
    throw std::invalid_argument("critic expects an action embedding");
  std::vector<double> input(params.state_dim + params.action_dim);
  std::copy(state, state + params.state_dim, input.begin());
  if (params.action_dim > 0)
    std::copy(action_emb, action_emb + params.action_dim, input.begin() + params.state_dim);
  std::vector<double> pre(params.hidden);
  matvec(params.w1, input.data(), pre.data());
  kernels::add(pre.data(), params.b1.data(), params.hidden);
  std::vector<double> hid(pre);
  kernels::relu(hid.data(), hid.data(), params.hidden);
  double v = kernels::dot(params.w2.data(), hid.data(), params.hidden) + params.b2[0];
  if (trace != nullptr) {
    trace->input = std::move(input);
    trace->pre = std::move(pre);
  }
  return v;
}

void critic_backward(const CriticParams& params, const CriticTrace& trace, double d_out,
                     CriticParams& grad, double* d_state, double* d_action) {
  std::vector<double> hid(trace.pre);
  kernels::relu(hid.data(), hid.data(), params.hidden);
  grad.b2[0] += d_out;
  kernels::axpy(d_out, hid.data(), grad.w2.data(), params.hidden);
  std::vector<double> d_pre(params.hidden);
  for (std::size_t j = 0; j < params.hidden; j++) d_pre[j] = d_out * params.w2[j];
  kernels::relu_mask(trace.pre.data(), d_pre.data(), d_pre.data(), params.hidden);
  kernels::add(grad.b1.data(), d_pre.data(), params.hidden);
  outer_acc(grad.w1, d_pre.data(), trace.input.data());
  if (d_state != nullptr || d_action != nullptr) {
    std::vector<double> d_input(trace.input.size(), 0.0);
    matvec_t_acc(params.w1, d_pre.data(), d_input.data());
    if (d_state != nullptr)
      for (std::size_t i = 0; i < params.state_dim; i++) d_state[i] += d_input[i];
    if (d_action != nullptr)
      for (std::size_t i = 0; i < params.action_dim; i++)
        d_action[i] += d_input[params.state_dim + i];
  }
}

}  // namespace gumbelrec
