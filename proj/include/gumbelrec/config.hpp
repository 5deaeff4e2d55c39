// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gumbelrec {

// Flat typed run configuration. Text form is one `key = value` per line;
// '#' starts a comment. Unknown keys and ill-typed values are rejected.
struct RunConfig {
  std::uint64_t seed = 1;

  // encoder
  std::uint64_t embedding_dim = 50;
  std::uint64_t heads = 1;
  std::uint64_t blocks = 1;
  std::uint64_t window = 10;

  // heads shared width
  std::uint64_t hidden = 512;

  // training
  std::string optimizer = "reinforce";  // reinforce | td | ppo
  double discount = 0.7;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double disc_lr = 1e-3;
  std::uint64_t batch_size = 256;
  double gae_lambda = 0.97;
  double clip_eps = 0.2;
  double reward_temperature = 0.2;
  double action_temperature = 0.2;
  std::uint64_t iterations = 100;
  std::uint64_t disc_steps = 1;
  std::uint64_t policy_steps = 1;
  std::uint64_t episodes_per_iteration = 100;
  std::uint64_t ppo_epochs = 4;
  bool gumbel_reward = true;  // false: deterministic-softmax reward ablation
  bool td_supervised_ce = false;
  bool predefined_feedback = false;
  double click_bonus = 0.2;
  double purchase_bonus = 1.0;

  // environment
  std::string env = "simulator";  // simulator | replay
  std::string dataset_path;
  std::string output_dir = ".";
  std::uint64_t catalog = 200;
  std::uint64_t max_steps = 20;
  std::uint64_t sim_clusters = 5;
  double sim_drift = 0.02;
  double test_fraction = 0.1;

  // evaluation and logging
  std::uint64_t eval_episodes = 100;
  std::uint64_t checkpoint_every = 10;
  bool log_wallclock = false;
  bool emit_plot = false;
};

// All config keys in serialization order.
std::vector<std::string> config_keys();

// Parses full text; later assignments win. Throws std::runtime_error with
// the line number on unknown keys or ill-typed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Applies one `key` = `value` pair (CLI override path).
void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value);

// One `key = value` per line in declaration order; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Range and enum checks; throws std::invalid_argument.
void validate_config(const RunConfig& cfg);

}  // namespace gumbelrec
