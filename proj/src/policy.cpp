// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gumbelrec/gumbel.hpp"
#include "gumbelrec/kernels.hpp"
#include "gumbelrec/numeric.hpp"
#include "gumbelrec/scm.hpp"

namespace gumbelrec {

PolicyParams PolicyParams::init(std::size_t state_dim, std::size_t action_dim,
                                std::size_t hidden, double gamma_a, Rng& rng) {
  if (state_dim == 0 || action_dim == 0 || hidden == 0)
    throw std::invalid_argument("policy dimensions must be positive");
  if (!(gamma_a > 0.0)) throw std::invalid_argument("gamma_a must be positive");
  PolicyParams p;
  p.state_dim = state_dim;
  p.action_dim = action_dim;
  p.hidden = hidden;
  p.gamma_a = gamma_a;
  const std::size_t in = state_dim + action_dim;
  p.big_w = Mat(hidden, in);
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (auto& v : p.big_w.data) v = (2.0 * rng.uniform() - 1.0) * bound;
  p.w.resize(hidden);
  bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (auto& v : p.w) v = (2.0 * rng.uniform() - 1.0) * bound;
  p.b.assign(hidden, 0.0);
  return p;
}

PolicyParams PolicyParams::zeros_like() const {
  PolicyParams g = *this;
  g.big_w.zero();
  std::fill(g.w.begin(), g.w.end(), 0.0);
  std::fill(g.b.begin(), g.b.end(), 0.0);
  return g;
}

namespace {

void score_one(const PolicyParams& p, const double* state, const double* action_emb,
               double* input_row, double* pre_row, double& z_out, double& h_out) {
  std::copy(state, state + p.state_dim, input_row);
  std::copy(action_emb, action_emb + p.action_dim, input_row + p.state_dim);
  matvec(p.big_w, input_row, pre_row);
  kernels::add(pre_row, p.b.data(), p.hidden);
  std::vector<double> hid(pre_row, pre_row + p.hidden);
  kernels::relu(hid.data(), hid.data(), p.hidden);
  z_out = kernels::dot(p.w.data(), hid.data(), p.hidden);
  h_out = softplus(z_out);
}

}  // namespace

double score_action(const PolicyParams& params, const double* state, const double* action_emb) {
  std::vector<double> input(params.state_dim + params.action_dim);
  std::vector<double> pre(params.hidden);
  double z = 0.0, h = 0.0;
  score_one(params, state, action_emb, input.data(), pre.data(), z, h);
  return h;
}

std::vector<double> score_catalog(const PolicyParams& params, const double* state,
                                  const Mat& table, std::size_t first_row,
                                  std::size_t n_actions, PolicyTrace* trace) {
  if (n_actions == 0) throw std::invalid_argument("empty action catalog");
  if (first_row + n_actions > table.rows) throw std::out_of_range("action rows exceed table");
  if (table.cols != params.action_dim)
    throw std::invalid_argument("action embedding width mismatch");
  std::vector<double> h(n_actions);
  Mat inputs(n_actions, params.state_dim + params.action_dim);
  Mat pre(n_actions, params.hidden);
  std::vector<double> z(n_actions);
  for (std::size_t i = 0; i < n_actions; i++)
    score_one(params, state, table.row(first_row + i), inputs.row(i), pre.row(i), z[i], h[i]);
  if (trace != nullptr) {
    trace->inputs = std::move(inputs);
    trace->pre = std::move(pre);
    trace->z = std::move(z);
    trace->h = h;
  }
  return h;
}

std::vector<double> policy_distribution(const PolicyParams& params,
                                        const std::vector<double>& state, const Mat& table,
                                        std::size_t first_row, std::size_t n_actions,
                                        const std::vector<double>& noise) {
  if (!(params.gamma_a > 0.0)) throw std::invalid_argument("gamma_a must be positive");
  if (noise.size() != n_actions) throw std::invalid_argument("noise length mismatch");
  if (state.size() != params.state_dim) throw std::invalid_argument("state length mismatch");
  std::vector<double> h = score_catalog(params, state.data(), table, first_row, n_actions);
  std::vector<double> y(n_actions);
  for (std::size_t i = 0; i < n_actions; i++)
    y[i] = (std::log(h[i]) + noise[i]) / params.gamma_a;
  softmax(y.data(), y.data(), n_actions);
  return y;
}

std::vector<std::size_t> act(const PolicyParams& params, const std::vector<double>& state,
                             const Mat& table, std::size_t first_row, std::size_t n_actions,
                             ActMode mode, std::size_t k, Rng& rng) {
  if (state.size() != params.state_dim) throw std::invalid_argument("state length mismatch");
  std::vector<double> h = score_catalog(params, state.data(), table, first_row, n_actions);
  if (mode == ActMode::sample) {
    std::vector<double> logh(n_actions);
    for (std::size_t i = 0; i < n_actions; i++) logh[i] = std::log(h[i]);
    auto noise = sample_gumbel(rng, n_actions);
    return {gumbel_max_select(logh, noise)};
  }
  if (k > n_actions) throw std::out_of_range("top_k larger than catalog");
  std::vector<std::size_t> order(n_actions);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (h[a] != h[b]) return h[a] > h[b];
    return a < b;
  });
  order.resize(k);
  return order;
}

double policy_logprob(const std::vector<double>& scores, std::size_t action) {
  if (action >= scores.size()) throw std::out_of_range("action outside catalog");
  double sum = 0.0;
  for (double v : scores) {
    if (!(v > 0.0)) throw std::invalid_argument("scores must be positive");
    sum += v;
  }
  double logp = std::log(scores[action]) - std::log(sum);
  if (!std::isfinite(logp)) throw std::runtime_error("policy log-probability underflow");
  return logp;
}

void policy_logprob_backward(const PolicyParams& params, const PolicyTrace& trace,
                             std::size_t action, double coeff, PolicyParams& grad) {
  const std::size_t n = trace.h.size();
  if (action >= n) throw std::out_of_range("action outside catalog");
  double sum = std::accumulate(trace.h.begin(), trace.h.end(), 0.0);
  std::vector<double> hid(params.hidden);
  std::vector<double> d_pre(params.hidden);
  for (std::size_t i = 0; i < n; i++) {
    // d log pi(a) / d log h_i = [i == a] - h_i / sum h
    double u = coeff * ((i == action ? 1.0 : 0.0) - trace.h[i] / sum);
    if (u == 0.0) continue;
    double dz = u * sigmoid(trace.z[i]) / trace.h[i];
    std::copy(trace.pre.row(i), trace.pre.row(i) + params.hidden, hid.begin());
    kernels::relu(hid.data(), hid.data(), params.hidden);
    kernels::axpy(dz, hid.data(), grad.w.data(), params.hidden);
    for (std::size_t j = 0; j < params.hidden; j++) d_pre[j] = dz * params.w[j];
    kernels::relu_mask(trace.pre.row(i), d_pre.data(), d_pre.data(), params.hidden);
    kernels::add(grad.b.data(), d_pre.data(), params.hidden);
    outer_acc(grad.big_w, d_pre.data(), trace.inputs.row(i));
  }
}

}  // namespace gumbelrec
