// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gumbelrec {

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
  if (rewards.empty()) throw std::invalid_argument("empty trajectory");
  std::vector<double> v(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc = rewards[i] + gamma * acc;
    v[i] = acc;
  }
  return v;
}

PolicyParams reinforce_gradient(const std::vector<Trajectory>& trajectories,
                                const std::vector<std::vector<double>>& returns,
                                const PolicyParams& policy, const Mat& table,
                                std::size_t first_row, std::size_t n_actions) {
  if (trajectories.empty()) throw std::invalid_argument("empty trajectory batch");
  if (returns.size() != trajectories.size())
    throw std::invalid_argument("returns/trajectories length mismatch");
  PolicyParams grad = policy.zeros_like();
  const double inv_n = 1.0 / static_cast<double>(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); i++) {
    const Trajectory& traj = trajectories[i];
    if (returns[i].size() != traj.size())
      throw std::invalid_argument("returns length mismatch within trajectory");
    for (std::size_t t = 0; t < traj.size(); t++) {
      PolicyTrace trace;
      auto h = score_catalog(policy, traj[t].state.data(), table, first_row, n_actions, &trace);
      policy_logprob(h, traj[t].action);  // validates positive probability
      policy_logprob_backward(policy, trace, traj[t].action, inv_n * returns[i][t], grad);
    }
  }
  return grad;
}

TdResult td_update(const std::vector<TdTransition>& batch, const CriticParams& critic,
                   const Mat& table, std::size_t first_row, std::size_t n_actions,
                   double gamma) {
  if (batch.empty()) throw std::invalid_argument("empty transition batch");
  TdResult out;
  out.grad = critic.zeros_like();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& tr : batch) {
    double target = tr.reward;
    if (!tr.terminal) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n_actions; i++)
        best = std::max(best,
                        critic_value(critic, tr.next_state.data(), table.row(first_row + i)));
      target += gamma * best;
    }
    CriticTrace trace;
    double v = critic_value(critic, tr.state.data(), tr.action_emb.data(), &trace);
    double err = v - target;
    out.loss += inv_n * err * err;
    critic_backward(critic, trace, inv_n * 2.0 * err, out.grad);
  }
  return out;
}

std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double gamma,
                                   double lambda) {
  if (rewards.empty()) throw std::invalid_argument("empty trajectory");
  if (values.size() != rewards.size())
    throw std::invalid_argument("values/rewards length mismatch");
  const std::size_t n = rewards.size();
  std::vector<double> adv(n);
  double acc = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    double next_v = (t + 1 < n) ? values[t + 1] : 0.0;
    double delta = rewards[t] + gamma * next_v - values[t];
    acc = delta + gamma * lambda * acc;
    adv[t] = acc;
  }
  return adv;
}

PpoResult ppo_clip_loss(const std::vector<double>& ratios,
                        const std::vector<double>& advantages, double eps) {
  if (ratios.empty() || ratios.size() != advantages.size())
    throw std::invalid_argument("ratios/advantages length mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("clip range must be positive");
  PpoResult out;
  out.d_ratio.assign(ratios.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); i++) {
    double r = ratios[i];
    if (!(r > 0.0)) throw std::invalid_argument("probability ratio must be positive");
    double a = advantages[i];
    double plain = r * a;
    double clipped = std::clamp(r, 1.0 - eps, 1.0 + eps) * a;
    if (plain <= clipped) {
      out.objective += inv_n * plain;
      out.d_ratio[i] = inv_n * a;
    } else {
      out.objective += inv_n * clipped;
    }
  }
  return out;
}

}  // namespace gumbelrec
