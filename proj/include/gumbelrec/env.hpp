// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Feedback classes shared with the reward head.
inline constexpr int kNoEvent = 0;
inline constexpr int kClick = 1;
inline constexpr int kPurchase = 2;

struct SessionEvent {
  std::int64_t timestamp = 0;
  std::size_t item = 0;  // dense id in [0, catalog)
  int feedback = kClick;
};

struct Session {
  std::int64_t id = 0;
  std::vector<SessionEvent> events;
};

struct DatasetStats {
  std::size_t interactions = 0;
  std::size_t items = 0;
  std::size_t clicks = 0;
  std::size_t purchases = 0;
};

struct SessionDataset {
  std::vector<Session> sessions;
  std::vector<std::size_t> item_ids;  // dense id -> original id, ascending
  std::size_t catalog = 0;
  DatasetStats stats;
};

// behavior token -> feedback class
using BehaviorMapping = std::map<std::string, int>;

// view -> click, addtocart/transaction -> purchase, plus canonical tokens.
BehaviorMapping default_behavior_mapping();

// Parses "session_id timestamp item_id behavior" rows (comma, tab, or space
// separated), orders events by time within each session, then repeatedly
// drops items occurring fewer than 3 times and sessions shorter than 3
// events until stable. Item ids are re-indexed densely.
SessionDataset load_sessions(const std::string& path, const BehaviorMapping& mapping);

// Writes the dataset back out as one event per row with original item ids
// and canonical behavior tokens.
void write_sessions(const SessionDataset& dataset, const std::string& path);

// Session-level split; both halves share the parent's item id space.
std::pair<SessionDataset, SessionDataset> split_sessions(const SessionDataset& dataset,
                                                         double test_fraction,
                                                         std::uint64_t seed);

struct ReplayCursor {
  std::size_t session = 0;
  std::size_t event = 0;
};

struct ReplayStep {
  std::size_t logged_item = 0;
  int logged_feedback = kNoEvent;
  bool done = false;
  ReplayCursor next;
};

// Advances along the logged session regardless of the proposed action; the
// logged event is what extends the history prefix and scores the proposal.
ReplayStep replay_env_step(const SessionDataset& dataset, ReplayCursor cursor,
                           std::size_t proposed_action);

inline constexpr std::size_t kUserAttrs = 11;
inline constexpr std::size_t kUserEncodingDim = 88;  // 8 dims per attribute

struct SimulatorConfig {
  std::size_t catalog = 200;
  std::size_t clusters = 5;
  std::size_t max_steps = 20;
  double drift_prob = 0.02;
};

// reward >= 7 -> purchase, >= 3 -> click, else no event.
int feedback_for_reward(int reward);

// Online user model: a hidden binary attribute vector prefers one item
// cluster; compatibility of an item depends on its cluster's ring distance
// from the preferred cluster and on the item's intrinsic quality, and the
// attributes drift a little after every step. Rewards are integers in
// [0, 10]; an episode ends after max_steps or three zero rewards in a row.
// The latent path depends only on (seed, episode_key), never on actions.
class Simulator {
 public:
  Simulator(const SimulatorConfig& config, std::uint64_t seed);

  void reset(std::uint64_t episode_key);

  struct StepResult {
    int reward = 0;
    int feedback = kNoEvent;
    bool done = false;
  };
  StepResult step(std::size_t action);

  bool done() const { return done_; }
  std::size_t steps() const { return t_; }
  double episode_reward() const { return r_epi_; }
  std::size_t catalog() const { return config_.catalog; }
  const SimulatorConfig& config() const { return config_; }

  const std::vector<int>& attributes() const { return attrs_; }
  std::vector<double> encoding() const;  // 88-dim expansion of the attributes
  std::size_t preferred_cluster() const;
  std::size_t item_cluster(std::size_t item) const;
  double item_quality(std::size_t item) const;
  double compatibility(std::size_t item) const;

 private:
  SimulatorConfig config_;
  std::uint64_t seed_ = 0;
  Rng episode_rng_;
  std::vector<int> attrs_;
  std::size_t t_ = 0;
  double r_epi_ = 0.0;
  int zero_run_ = 0;
  bool done_ = true;
};

// Oracle policy reading the hidden attributes: argmax compatibility,
// ties to the lowest item id.
std::size_t expert_action(const Simulator& sim);

// Rolls seeded simulator episodes under an expert/random mixture and logs
// the steps that produce feedback; the result is filtered like
// load_sessions output.
SessionDataset generate_synthetic_dataset(std::uint64_t seed, std::size_t sessions,
                                          std::size_t catalog,
                                          double expert_fraction = 0.1);

}  // namespace gumbelrec
