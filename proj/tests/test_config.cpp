// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gumbelrec/config.hpp"

#include <sstream>

using namespace gumbelrec;

TEST_CASE("defaults match the published training setup") {
  RunConfig c;
  CHECK(c.discount == 0.7);
  CHECK(c.batch_size == 256);
  CHECK(c.window == 10);
  CHECK(c.gae_lambda == 0.97);
  CHECK(c.clip_eps == 0.2);
  CHECK(c.reward_temperature == 0.2);
  CHECK(c.action_temperature == 0.2);
  CHECK(c.actor_lr == 1e-4);
  CHECK(c.critic_lr == 1e-3);
  CHECK(c.embedding_dim == 50);
  CHECK(c.heads == 1);
  CHECK(c.blocks == 1);
  CHECK(c.hidden == 512);
  CHECK(c.optimizer == "reinforce");
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("serialize then parse is the identity") {
  RunConfig c;
  c.seed = 987654321;
  c.embedding_dim = 16;
  c.optimizer = "ppo";
  c.discount = 0.30000000000000004;
  c.actor_lr = 1e-7;
  c.td_supervised_ce = true;
  c.dataset_path = "data/train.tsv";
  c.output_dir = "out/run 1";
  c.emit_plot = true;
  c.sim_drift = 0.125;

  std::string text = serialize_config(c);
  RunConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);

  CHECK(back.seed == 987654321);
  CHECK(back.embedding_dim == 16);
  CHECK(back.optimizer == "ppo");
  CHECK(back.discount == 0.30000000000000004);
  CHECK(back.actor_lr == 1e-7);
  CHECK(back.td_supervised_ce == true);
  CHECK(back.dataset_path == "data/train.tsv");
  CHECK(back.output_dir == "out/run 1");
  CHECK(back.emit_plot == true);
  CHECK(back.sim_drift == 0.125);
}

TEST_CASE("every key serializes exactly once") {
  std::string text = serialize_config(RunConfig{});
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == config_keys().size());
  for (const auto& key : config_keys()) {
    CHECK(text.find(key + " = ") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with the line number") {
  CHECK_THROWS_WITH_AS(parse_config("seed = 3\nlerning_rate = 0.1\n"),
                       "line 2: unknown key 'lerning_rate'", std::runtime_error);
}

TEST_CASE("ill-typed values are rejected") {
  CHECK_THROWS_AS(parse_config("batch_size = fast\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("batch_size = -3\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("batch_size = 1.5\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("discount = high\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("log_wallclock = yes\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_config("seed 3\n"), std::runtime_error);
}

TEST_CASE("comments and blank lines are ignored, later assignments win") {
  RunConfig c = parse_config(
      "# run settings\n"
      "\n"
      "seed = 5   # first\n"
      "seed = 9\n"
      "  optimizer   =   td  \n");
  CHECK(c.seed == 9);
  CHECK(c.optimizer == "td");
}

TEST_CASE("overrides mirror the file syntax") {
  RunConfig c;
  apply_config_override(c, "iterations", "17");
  apply_config_override(c, "env", "replay");
  CHECK(c.iterations == 17);
  CHECK(c.env == "replay");
  CHECK_THROWS_WITH_AS(apply_config_override(c, "bogus", "1"), "unknown config key 'bogus'",
                       std::runtime_error);
  CHECK_THROWS_AS(apply_config_override(c, "heads", "two"), std::runtime_error);
}

TEST_CASE("validation rejects out-of-range settings") {
  RunConfig c;
  c.optimizer = "sarsa";
  CHECK_THROWS_WITH_AS(validate_config(c),
                       "optimizer must be one of: reinforce, td, ppo (got 'sarsa')",
                       std::invalid_argument);
  c = RunConfig{};
  c.env = "live";
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c = RunConfig{};
  c.embedding_dim = 50;
  c.heads = 3;
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c = RunConfig{};
  c.discount = 0.0;
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c = RunConfig{};
  c.clip_eps = 1.0;
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c = RunConfig{};
  c.env = "replay";
  c.dataset_path.clear();
  CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
  c.dataset_path = "x.tsv";
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config files load from disk") {
  std::string path = "test_config_tmp.cfg";
  {
    std::ofstream out(path);
    out << "seed = 42\ncatalog = 77\n";
  }
  RunConfig c = load_config_file(path);
  CHECK(c.seed == 42);
  CHECK(c.catalog == 77);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config_file("no_such_file.cfg"), std::runtime_error);
}
