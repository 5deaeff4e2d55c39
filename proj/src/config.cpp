// SPDX-License-Identifier: Apache-2.0
#include "gumbelrec/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gumbelrec {
namespace {

struct Field {
  const char* name;
  std::uint64_t RunConfig::* u = nullptr;
  double RunConfig::* f = nullptr;
  bool RunConfig::* b = nullptr;
  std::string RunConfig::* s = nullptr;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> t = {
      {"seed", &RunConfig::seed, nullptr, nullptr, nullptr},
      {"embedding_dim", &RunConfig::embedding_dim, nullptr, nullptr, nullptr},
      {"heads", &RunConfig::heads, nullptr, nullptr, nullptr},
      {"blocks", &RunConfig::blocks, nullptr, nullptr, nullptr},
      {"window", &RunConfig::window, nullptr, nullptr, nullptr},
      {"hidden", &RunConfig::hidden, nullptr, nullptr, nullptr},
      {"optimizer", nullptr, nullptr, nullptr, &RunConfig::optimizer},
      {"discount", nullptr, &RunConfig::discount, nullptr, nullptr},
      {"actor_lr", nullptr, &RunConfig::actor_lr, nullptr, nullptr},
      {"critic_lr", nullptr, &RunConfig::critic_lr, nullptr, nullptr},
      {"disc_lr", nullptr, &RunConfig::disc_lr, nullptr, nullptr},
      {"batch_size", &RunConfig::batch_size, nullptr, nullptr, nullptr},
      {"gae_lambda", nullptr, &RunConfig::gae_lambda, nullptr, nullptr},
      {"clip_eps", nullptr, &RunConfig::clip_eps, nullptr, nullptr},
      {"reward_temperature", nullptr, &RunConfig::reward_temperature, nullptr, nullptr},
      {"action_temperature", nullptr, &RunConfig::action_temperature, nullptr, nullptr},
      {"iterations", &RunConfig::iterations, nullptr, nullptr, nullptr},
      {"disc_steps", &RunConfig::disc_steps, nullptr, nullptr, nullptr},
      {"policy_steps", &RunConfig::policy_steps, nullptr, nullptr, nullptr},
      {"episodes_per_iteration", &RunConfig::episodes_per_iteration, nullptr, nullptr, nullptr},
      {"ppo_epochs", &RunConfig::ppo_epochs, nullptr, nullptr, nullptr},
      {"gumbel_reward", nullptr, nullptr, &RunConfig::gumbel_reward, nullptr},
      {"td_supervised_ce", nullptr, nullptr, &RunConfig::td_supervised_ce, nullptr},
      {"predefined_feedback", nullptr, nullptr, &RunConfig::predefined_feedback, nullptr},
      {"click_bonus", nullptr, &RunConfig::click_bonus, nullptr, nullptr},
      {"purchase_bonus", nullptr, &RunConfig::purchase_bonus, nullptr, nullptr},
      {"env", nullptr, nullptr, nullptr, &RunConfig::env},
      {"dataset_path", nullptr, nullptr, nullptr, &RunConfig::dataset_path},
      {"output_dir", nullptr, nullptr, nullptr, &RunConfig::output_dir},
      {"catalog", &RunConfig::catalog, nullptr, nullptr, nullptr},
      {"max_steps", &RunConfig::max_steps, nullptr, nullptr, nullptr},
      {"sim_clusters", &RunConfig::sim_clusters, nullptr, nullptr, nullptr},
      {"sim_drift", nullptr, &RunConfig::sim_drift, nullptr, nullptr},
      {"test_fraction", nullptr, &RunConfig::test_fraction, nullptr, nullptr},
      {"eval_episodes", &RunConfig::eval_episodes, nullptr, nullptr, nullptr},
      {"checkpoint_every", &RunConfig::checkpoint_every, nullptr, nullptr, nullptr},
      {"log_wallclock", nullptr, nullptr, &RunConfig::log_wallclock, nullptr},
      {"emit_plot", nullptr, nullptr, &RunConfig::emit_plot, nullptr},
  };
  return t;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (key == f.name) return &f;
  }
  return nullptr;
}

std::uint64_t parse_u64(const std::string& v) {
  if (v.empty() || v[0] == '-') throw std::runtime_error("not an unsigned integer");
  std::size_t pos = 0;
  std::uint64_t out = std::stoull(v, &pos);
  if (pos != v.size()) throw std::runtime_error("not an unsigned integer");
  return out;
}

double parse_f64(const std::string& v) {
  std::size_t pos = 0;
  double out = std::stod(v, &pos);
  if (pos != v.size()) throw std::runtime_error("not a number");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("not a boolean");
}

void assign(RunConfig& cfg, const Field& f, const std::string& value) {
  if (f.u) {
    cfg.*(f.u) = parse_u64(value);
  } else if (f.f) {
    cfg.*(f.f) = parse_f64(value);
  } else if (f.b) {
    cfg.*(f.b) = parse_bool(value);
  } else {
    cfg.*(f.s) = value;
  }
}

// Shortest decimal form that parses back to the same bits.
std::string format_f64(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; prec++) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string render(const RunConfig& cfg, const Field& f) {
  if (f.u) return std::to_string(cfg.*(f.u));
  if (f.f) return format_f64(cfg.*(f.f));
  if (f.b) return (cfg.*(f.b)) ? "true" : "false";
  return cfg.*(f.s);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  out.reserve(fields().size());
  for (const auto& f : fields()) out.emplace_back(f.name);
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (!f) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    try {
      assign(cfg, *f, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": bad value for '" + key +
                               "': " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw std::runtime_error("unknown config key '" + key + "'");
  try {
    assign(cfg, *f, value);
  } catch (const std::exception& e) {
    throw std::runtime_error("bad value for '" + key + "': " + e.what());
  }
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& f : fields()) {
    out << f.name << " = " << render(cfg, f) << "\n";
  }
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (cfg.optimizer != "reinforce" && cfg.optimizer != "td" && cfg.optimizer != "ppo") {
    fail("optimizer must be one of: reinforce, td, ppo (got '" + cfg.optimizer + "')");
  }
  if (cfg.env != "simulator" && cfg.env != "replay") {
    fail("env must be one of: simulator, replay (got '" + cfg.env + "')");
  }
  if (cfg.embedding_dim == 0) fail("embedding_dim must be positive");
  if (cfg.heads == 0 || cfg.embedding_dim % cfg.heads != 0) {
    fail("heads must be positive and divide embedding_dim");
  }
  if (cfg.blocks == 0) fail("blocks must be positive");
  if (cfg.window == 0) fail("window must be positive");
  if (cfg.hidden == 0) fail("hidden must be positive");
  if (!(cfg.discount > 0.0 && cfg.discount <= 1.0)) fail("discount must be in (0, 1]");
  if (!(cfg.actor_lr > 0.0) || !(cfg.critic_lr > 0.0) || !(cfg.disc_lr > 0.0)) {
    fail("learning rates must be positive");
  }
  if (cfg.batch_size == 0) fail("batch_size must be positive");
  if (!(cfg.gae_lambda >= 0.0 && cfg.gae_lambda <= 1.0)) fail("gae_lambda must be in [0, 1]");
  if (!(cfg.clip_eps > 0.0 && cfg.clip_eps < 1.0)) fail("clip_eps must be in (0, 1)");
  if (!(cfg.reward_temperature > 0.0)) fail("reward_temperature must be positive");
  if (!(cfg.action_temperature > 0.0)) fail("action_temperature must be positive");
  if (cfg.ppo_epochs == 0) fail("ppo_epochs must be positive");
  if (cfg.episodes_per_iteration == 0) fail("episodes_per_iteration must be positive");
  if (cfg.catalog == 0) fail("catalog must be positive");
  if (cfg.max_steps == 0) fail("max_steps must be positive");
  if (cfg.sim_clusters == 0) fail("sim_clusters must be positive");
  if (!(cfg.sim_drift >= 0.0 && cfg.sim_drift <= 1.0)) fail("sim_drift must be in [0, 1]");
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0)) {
    fail("test_fraction must be in [0, 1)");
  }
  if (cfg.eval_episodes == 0) fail("eval_episodes must be positive");
  if (cfg.checkpoint_every == 0) fail("checkpoint_every must be positive");
  if (cfg.env == "replay" && cfg.dataset_path.empty()) {
    fail("env = replay requires dataset_path");
  }
}

}  // namespace gumbelrec
