// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/reward.hpp"

#include <cmath>
#include <stdexcept>

#include "gumbelrec/gumbel.hpp"
#include "gumbelrec/kernels.hpp"
#include "gumbelrec/numeric.hpp"

namespace gumbelrec {

namespace {

Mat uniform_fan_in(Rng& rng, std::size_t rows, std::size_t cols) {
  Mat m(rows, cols);
  double s = 1.0 / std::sqrt(static_cast<double>(cols));
  for (auto& v : m.data) v = s * (2.0 * rng.uniform() - 1.0);
  return m;
}

}  // namespace

RewardHead RewardHead::init(std::size_t state_dim, std::size_t action_dim, std::size_t hidden,
                            std::size_t classes, Rng& rng) {
  if (classes < 2) throw std::invalid_argument("need at least two feedback classes");
  if (hidden == 0 || state_dim == 0) throw std::invalid_argument("bad reward head dimensions");
  RewardHead h;
  h.state_dim = state_dim;
  h.action_dim = action_dim;
  h.hidden = hidden;
  h.classes = classes;
  h.w1 = uniform_fan_in(rng, hidden, state_dim + action_dim);
  h.b1.assign(hidden, 0.0);
  h.w2 = uniform_fan_in(rng, classes, hidden);
  h.b2.assign(classes, 0.0);
  return h;
}

RewardHead RewardHead::zeros_like() const {
  RewardHead z = *this;
  z.visit([](const std::string&, std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); });
  return z;
}

RewardTrace reward_forward(const RewardHead& head, const double* s, const double* a) {
  RewardTrace t;
  t.input.resize(head.state_dim + head.action_dim);
  std::copy(s, s + head.state_dim, t.input.begin());
  std::copy(a, a + head.action_dim, t.input.begin() + head.state_dim);
  t.pre = head.b1;
  for (std::size_t i = 0; i < head.hidden; i++)
    t.pre[i] += kernels::dot(head.w1.row(i), t.input.data(), t.input.size());
  t.hid.resize(head.hidden);
  kernels::relu(t.pre.data(), t.hid.data(), head.hidden);
  std::vector<double> raw = head.b2;
  for (std::size_t c = 0; c < head.classes; c++)
    raw[c] += kernels::dot(head.w2.row(c), t.hid.data(), head.hidden);
  t.logp.resize(head.classes);
  log_softmax(raw.data(), t.logp.data(), head.classes);
  return t;
}

std::vector<double> reward_logits(const RewardHead& head, const std::vector<double>& s,
                                  const std::vector<double>& a) {
  if (s.size() != head.state_dim || a.size() != head.action_dim)
    throw std::invalid_argument("reward_logits: input dimensions do not match head");
  return reward_forward(head, s.data(), a.data()).logp;
}

void reward_backward(const RewardHead& head, const RewardTrace& trace,
                     const std::vector<double>& d_logp, RewardHead& grad, double* d_s,
                     double* d_a) {
  double total = 0.0;
  for (double v : d_logp) total += v;
  std::vector<double> d_raw(head.classes);
  for (std::size_t c = 0; c < head.classes; c++)
    d_raw[c] = d_logp[c] - std::exp(trace.logp[c]) * total;

  kernels::add(grad.b2.data(), d_raw.data(), head.classes);
  outer_acc(grad.w2, d_raw.data(), trace.hid.data());
  std::vector<double> d_hid(head.hidden, 0.0);
  matvec_t_acc(head.w2, d_raw.data(), d_hid.data());
  std::vector<double> d_pre(head.hidden);
  kernels::relu_mask(trace.pre.data(), d_hid.data(), d_pre.data(), head.hidden);
  kernels::add(grad.b1.data(), d_pre.data(), head.hidden);
  outer_acc(grad.w1, d_pre.data(), trace.input.data());
  if (d_s == nullptr && d_a == nullptr) return;
  std::vector<double> d_input(trace.input.size(), 0.0);
  matvec_t_acc(head.w1, d_pre.data(), d_input.data());
  if (d_s != nullptr) kernels::add(d_s, d_input.data(), head.state_dim);
  if (d_a != nullptr) kernels::add(d_a, d_input.data() + head.state_dim, head.action_dim);
}

std::vector<double> gumbel_softmax_sample(const std::vector<double>& logits,
                                          const std::vector<double>& noise, double gamma_r) {
  if (gamma_r <= 0.0) throw std::invalid_argument("gumbel-softmax temperature must be positive");
  if (logits.size() != noise.size())
    throw std::invalid_argument("gumbel_softmax_sample: length mismatch");
  return gumbel_softmax(logits, noise, gamma_r);
}

double clipped_reward(const std::vector<double>& r_tilde, std::size_t positive_index) {
  if (positive_index >= r_tilde.size())
    throw std::out_of_range("clipped_reward: class index out of range");
  return 2.0 * r_tilde[positive_index] - 0.5;
}

double group_reward(const std::vector<double>& r_tilde,
                    const std::vector<std::size_t>& positive_classes) {
  double mass = 0.0;
  for (std::size_t c : positive_classes) {
    if (c >= r_tilde.size()) throw std::out_of_range("group_reward: class index out of range");
    mass += r_tilde[c];
  }
  return 2.0 * mass - 0.5;
}

DiscTrace discriminate(const RewardHead& head, const std::vector<double>& logp,
                       const std::vector<double>& r_tilde) {
  if (logp.size() != head.classes || r_tilde.size() != head.classes)
    throw std::invalid_argument("discriminate: class count mismatch");
  DiscTrace t;
  t.phi = kernels::dot(r_tilde.data(), logp.data(), head.classes);
  t.m = group_reward(r_tilde, head.positive_classes);
  t.t = head.readout[0] * t.phi + head.readout[1] * t.m + head.readout[2];
  t.d = sigmoid(t.t);
  return t;
}

void sample_generated(std::vector<DiscRecord>& batch, const RewardHead& head, Rng& rng) {
  std::vector<double> noise(head.classes);
  for (auto& rec : batch) {
    RewardTrace t = reward_forward(head, rec.state.data(), rec.action_emb.data());
    sample_gumbel(rng, noise.data(), head.classes);
    rec.generated = gumbel_softmax_sample(t.logp, noise, head.gamma_r);
  }
}

AdversarialResult adversarial_losses(const std::vector<DiscRecord>& batch,
                                     const RewardHead& head) {
  if (batch.empty()) throw std::invalid_argument("adversarial_losses: empty batch");
  AdversarialResult res;
  res.grad = head.zeros_like();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> one_hot(head.classes), d_logp(head.classes);

  for (const auto& rec : batch) {
    if (rec.observed >= head.classes)
      throw std::out_of_range("adversarial_losses: feedback class out of range");
    if (rec.generated.size() != head.classes)
      throw std::invalid_argument("adversarial_losses: record lacks a generated sample");
    RewardTrace trace = reward_forward(head, rec.state.data(), rec.action_emb.data());

    std::fill(one_hot.begin(), one_hot.end(), 0.0);
    one_hot[rec.observed] = 1.0;
    DiscTrace real = discriminate(head, trace.logp, one_hot);
    DiscTrace gen = discriminate(head, trace.logp, rec.generated);

    res.disc_loss += inv_n * (softplus(-real.t) + softplus(gen.t));
    res.gen_loss += inv_n * -softplus(gen.t);
    res.mean_d_real += inv_n * real.d;
    res.mean_d_generated += inv_n * gen.d;

    // d disc_loss / d t, real branch then generated branch
    const double dt_real = -inv_n * (1.0 - real.d);
    const double dt_gen = inv_n * gen.d;
    res.grad.readout[0] += dt_real * real.phi + dt_gen * gen.phi;
    res.grad.readout[1] += dt_real * real.m + dt_gen * gen.m;
    res.grad.readout[2] += dt_real + dt_gen;

    const double alpha = head.readout[0];
    for (std::size_t c = 0; c < head.classes; c++)
      d_logp[c] = alpha * (dt_real * one_hot[c] + dt_gen * rec.generated[c]);

    res.d_state.emplace_back(head.state_dim, 0.0);
    res.d_action.emplace_back(head.action_dim, 0.0);
    reward_backward(head, trace, d_logp, res.grad, res.d_state.back().data(),
                    res.d_action.back().data());
  }
  return res;
}

}  // namespace gumbelrec
