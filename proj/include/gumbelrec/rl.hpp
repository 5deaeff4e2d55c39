// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "gumbelrec/critic.hpp"
#include "gumbelrec/mat.hpp"
#include "gumbelrec/policy.hpp"

namespace gumbelrec {

struct TrajStep {
  std::vector<double> state;
  std::size_t action = 0;
  int feedback = 0;
  double reward = 0.0;
};
using Trajectory = std::vector<TrajStep>;

// V^(t) = sum_{t' >= t} gamma^(t'-t) r^(t'), by backward recursion.
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

// Batch-mean of sum_t V^(t) grad log pi(a^(t) | s^(t)); ascent direction.
// returns[i] must hold the discounted returns of trajectories[i].
PolicyParams reinforce_gradient(const std::vector<Trajectory>& trajectories,
                                const std::vector<std::vector<double>>& returns,
                                const PolicyParams& policy, const Mat& table,
                                std::size_t first_row, std::size_t n_actions);

struct TdTransition {
  std::vector<double> state;
  std::vector<double> action_emb;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

struct TdResult {
  double loss = 0.0;
  CriticParams grad;
};

// Mean squared error of V(s, a) against the frozen bootstrap target
// r + gamma * max_a' V(s', a'); terminal transitions drop the bootstrap.
TdResult td_update(const std::vector<TdTransition>& batch, const CriticParams& critic,
                   const Mat& table, std::size_t first_row, std::size_t n_actions,
                   double gamma);

// A^(t) = sum_l (gamma*lambda)^l delta^(t+l) with
// delta^(t) = r^(t) + gamma V(s^(t+1)) - V(s^(t)), V past the end = 0.
std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double gamma,
                                   double lambda);

struct PpoResult {
  double objective = 0.0;
  std::vector<double> d_ratio;
};

// Mean over steps of min(r*A, clip(r, 1-eps, 1+eps)*A) and its derivative
// in each ratio (the clipped branch contributes zero slope).
PpoResult ppo_clip_loss(const std::vector<double>& ratios,
                        const std::vector<double>& advantages, double eps);

}  // namespace gumbelrec
