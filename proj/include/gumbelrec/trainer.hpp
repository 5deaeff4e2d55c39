// SPDX-License-Identifier: Apache-2.0
//
// Alternating adversarial/policy training loop. Each iteration first takes
// discriminator steps, updating the feedback head and the encoder on
// observational (state, action, feedback) records, then takes policy steps,
// updating the actor (and, for td/ppo, the critic) on trajectories whose
// per-step reward is the discriminator score of a freshly sampled relaxed
// feedback at the visited (state, action).

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gumbelrec/config.hpp"
#include "gumbelrec/env.hpp"
#include "gumbelrec/metrics.hpp"
#include "gumbelrec/model.hpp"

namespace gumbelrec {

struct MetricRecord {
  std::uint64_t iteration = 0;
  std::uint64_t wall_ms = 0;  // stays 0 unless log_wallclock is set
  std::string metric;
  double value = 0.0;
  std::string split = "train";
  int feedback_class = -1;  // -1 = aggregated over classes
};

// One line of structured text per record; identical records give identical
// bytes.
std::string metric_record_line(const MetricRecord& rec);

struct TrainResult {
  Model model;
  std::vector<MetricRecord> log;
  std::uint64_t iterations_done = 0;
  std::uint64_t episodes_consumed = 0;  // simulator episode keys used so far
};

using CheckpointHook =
    std::function<void(std::uint64_t iteration, const Model& model, std::uint64_t episodes)>;

// Runs cfg.iterations outer iterations. env = replay trains on the logged
// sessions; env = simulator rolls fresh episodes with the current policy.
// The dataset, when present, is also the observational source for the
// discriminator steps. Deterministic given (cfg, dataset).
TrainResult train(const RunConfig& cfg, const SessionDataset* dataset,
                  const CheckpointHook& hook = nullptr);

// Per-step reward used by every optimizer kind: the discriminator score of a
// relaxed feedback sample drawn at (state, action) with fresh noise, plus the
// predefined bonus for the observed class when that option is on. With
// gumbel = false the sample is replaced by the head's own probabilities (the
// deterministic-softmax ablation) and no noise is consumed.
double discriminator_reward(const RewardHead& head, const std::vector<double>& state,
                            const std::vector<double>& action_emb, Rng& rng,
                            bool gumbel = true);

// Deterministic ranking of all actions for one state: value ordering for the
// td kind, noise-free policy scores otherwise. Ties go to the lower id.
std::vector<std::size_t> rank_actions(const Model& model, const std::string& optimizer,
                                      const std::vector<double>& state, std::size_t catalog,
                                      std::size_t k);

// One ranking record per logged event with at least one preceding event.
std::vector<RankingRecord> replay_rankings(const Model& model, const RunConfig& cfg,
                                           const SessionDataset& dataset, std::size_t k);

// Per-episode CTR (episodic reward / (10 * steps)) over `episodes` simulator
// episodes keyed from key_base. Sampled actions draw from
// Rng::stream(cfg.seed, action_key, episode).
std::vector<double> ctr_samples(const Model& model, const RunConfig& cfg,
                                std::uint64_t key_base, std::size_t episodes,
                                std::uint64_t action_key);

// Mean of ctr_samples over the same protocol.
double evaluate_ctr(const Model& model, const RunConfig& cfg, std::uint64_t key_base,
                    std::size_t episodes, std::uint64_t action_key);

// Same protocol with uniformly random actions; the baseline for lift checks.
double random_ctr(const RunConfig& cfg, std::uint64_t key_base, std::size_t episodes,
                  std::uint64_t action_key);

}  // namespace gumbelrec
