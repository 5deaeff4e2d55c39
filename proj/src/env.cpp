// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gumbelrec {

BehaviorMapping default_behavior_mapping() {
  return {{"view", kClick},
          {"click", kClick},
          {"addtocart", kPurchase},
          {"purchase", kPurchase},
          {"transaction", kPurchase}};
}

namespace {

// Drops items seen fewer than 3 times and sessions shorter than 3 events
// until neither rule fires, then re-indexes items densely and fills stats.
SessionDataset finalize_dataset(std::vector<Session> sessions) {
  for (auto& s : sessions)
    std::stable_sort(s.events.begin(), s.events.end(),
                     [](const SessionEvent& a, const SessionEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::size_t, std::size_t> item_count;
    for (const auto& s : sessions)
      for (const auto& e : s.events) item_count[e.item]++;
    for (auto& s : sessions) {
      auto kept = std::remove_if(s.events.begin(), s.events.end(), [&](const SessionEvent& e) {
        return item_count.at(e.item) < 3;
      });
      if (kept != s.events.end()) {
        s.events.erase(kept, s.events.end());
        changed = true;
      }
    }
    auto kept = std::remove_if(sessions.begin(), sessions.end(),
                               [](const Session& s) { return s.events.size() < 3; });
    if (kept != sessions.end()) {
      sessions.erase(kept, sessions.end());
      changed = true;
    }
  }
  if (sessions.empty()) throw std::runtime_error("empty dataset after filtering");

  SessionDataset ds;
  std::set<std::size_t> ids;
  for (const auto& s : sessions)
    for (const auto& e : s.events) ids.insert(e.item);
  ds.item_ids.assign(ids.begin(), ids.end());
  ds.catalog = ds.item_ids.size();
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t i = 0; i < ds.item_ids.size(); i++) dense[ds.item_ids[i]] = i;
  for (auto& s : sessions)
    for (auto& e : s.events) e.item = dense.at(e.item);
  ds.sessions = std::move(sessions);
  for (const auto& s : ds.sessions)
    for (const auto& e : s.events) {
      ds.stats.interactions++;
      if (e.feedback == kClick) ds.stats.clicks++;
      if (e.feedback == kPurchase) ds.stats.purchases++;
    }
  ds.stats.items = ds.catalog;
  return ds;
}

}  // namespace

SessionDataset load_sessions(const std::string& path, const BehaviorMapping& mapping) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open session log: " + path);
  std::map<std::int64_t, Session> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    for (auto& ch : line)
      if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
    if (line.find_first_not_of(" \r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::int64_t sid = 0, ts = 0;
    long long item = -1;
    std::string behavior;
    if (!(ss >> sid >> ts >> item >> behavior) || item < 0)
      throw std::runtime_error("line " + std::to_string(line_no) + ": malformed row");
    auto it = mapping.find(behavior);
    if (it == mapping.end())
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown behavior '" +
                               behavior + "'");
    Session& s = by_id[sid];
    s.id = sid;
    s.events.push_back({ts, static_cast<std::size_t>(item), it->second});
  }
  std::vector<Session> sessions;
  sessions.reserve(by_id.size());
  for (auto& [id, s] : by_id) sessions.push_back(std::move(s));
  return finalize_dataset(std::move(sessions));
}

void write_sessions(const SessionDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write session log: " + path);
  for (const auto& s : dataset.sessions)
    for (const auto& e : s.events) {
      if (e.feedback != kClick && e.feedback != kPurchase)
        throw std::logic_error("dataset event without click/purchase feedback");
      out << s.id << '\t' << e.timestamp << '\t' << dataset.item_ids.at(e.item) << '\t'
          << (e.feedback == kClick ? "click" : "purchase") << '\n';
    }
  if (!out) throw std::runtime_error("failed writing session log: " + path);
}

std::pair<SessionDataset, SessionDataset> split_sessions(const SessionDataset& dataset,
                                                         double test_fraction,
                                                         std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0))
    throw std::invalid_argument("test fraction must lie in [0, 1]");
  const std::size_t n = dataset.sessions.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; i++) order[i] = i;
  Rng rng = Rng::stream(seed, 7);
  for (std::size_t i = n; i > 1; i--) std::swap(order[i - 1], order[rng.below(i)]);
  std::size_t n_test = static_cast<std::size_t>(static_cast<double>(n) * test_fraction + 0.5);
  n_test = std::min(n_test, n);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < n_test; i++) is_test[order[i]] = true;

  auto take = [&](bool test_side) {
    SessionDataset part;
    part.item_ids = dataset.item_ids;
    part.catalog = dataset.catalog;
    for (std::size_t i = 0; i < n; i++)
      if (is_test[i] == test_side) part.sessions.push_back(dataset.sessions[i]);
    for (const auto& s : part.sessions)
      for (const auto& e : s.events) {
        part.stats.interactions++;
        if (e.feedback == kClick) part.stats.clicks++;
        if (e.feedback == kPurchase) part.stats.purchases++;
      }
    part.stats.items = part.catalog;
    return part;
  };
  return {take(false), take(true)};
}

ReplayStep replay_env_step(const SessionDataset& dataset, ReplayCursor cursor,
                           std::size_t proposed_action) {
  if (cursor.session >= dataset.sessions.size())
    throw std::out_of_range("replay cursor past the last session");
  const Session& s = dataset.sessions[cursor.session];
  if (cursor.event >= s.events.size()) throw std::out_of_range("replay cursor past session end");
  if (proposed_action >= dataset.catalog)
    throw std::out_of_range("proposed action outside catalog");
  const SessionEvent& e = s.events[cursor.event];
  ReplayStep out;
  out.logged_item = e.item;
  out.logged_feedback = e.feedback;
  out.done = cursor.event + 1 == s.events.size();
  out.next = {cursor.session, cursor.event + 1};
  return out;
}

int feedback_for_reward(int reward) {
  if (reward >= 7) return kPurchase;
  if (reward >= 3) return kClick;
  return kNoEvent;
}

Simulator::Simulator(const SimulatorConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed), episode_rng_(0) {
  if (config_.catalog == 0 || config_.clusters == 0 || config_.max_steps == 0)
    throw std::invalid_argument("simulator sizes must be positive");
  if (!(config_.drift_prob >= 0.0 && config_.drift_prob <= 1.0))
    throw std::invalid_argument("drift probability must lie in [0, 1]");
}

void Simulator::reset(std::uint64_t episode_key) {
  episode_rng_ = Rng::stream(seed_, 2, episode_key);
  attrs_.assign(kUserAttrs, 0);
  for (auto& a : attrs_) a = episode_rng_.uniform() < 0.5 ? 1 : 0;
  t_ = 0;
  r_epi_ = 0.0;
  zero_run_ = 0;
  done_ = false;
}

std::vector<double> Simulator::encoding() const {
  std::vector<double> enc(kUserEncodingDim, 0.0);
  for (std::size_t i = 0; i < kUserAttrs; i++)
    for (std::size_t j = 0; j < 8; j++)
      enc[i * 8 + j] = (j < 4) == (attrs_[i] == 1) ? 1.0 : 0.0;
  return enc;
}

std::size_t Simulator::preferred_cluster() const {
  return static_cast<std::size_t>(attrs_[0] * 4 + attrs_[1] * 2 + attrs_[2]) % config_.clusters;
}

std::size_t Simulator::item_cluster(std::size_t item) const { return item % config_.clusters; }

double Simulator::item_quality(std::size_t item) const {
  return Rng::stream(seed_, 1, item).uniform();
}

double Simulator::compatibility(std::size_t item) const {
  if (item >= config_.catalog) throw std::out_of_range("item outside catalog");
  std::size_t pref = preferred_cluster();
  std::size_t c = item_cluster(item);
  std::size_t diff = c >= pref ? c - pref : pref - c;
  std::size_t dist = std::min(diff, config_.clusters - diff);
  double q = item_quality(item);
  if (dist == 0) return 0.65 + 0.25 * q;
  if (dist == 1) return 0.30 + 0.25 * q;
  return 0.10 * q;
}

Simulator::StepResult Simulator::step(std::size_t action) {
  if (done_) throw std::logic_error("episode already finished; reset first");
  if (action >= config_.catalog) throw std::out_of_range("action outside catalog");
  int reward = static_cast<int>(std::lround(10.0 * compatibility(action)));
  r_epi_ += reward;
  t_++;
  zero_run_ = reward == 0 ? zero_run_ + 1 : 0;
  for (auto& a : attrs_)
    if (episode_rng_.uniform() < config_.drift_prob) a ^= 1;
  done_ = t_ >= config_.max_steps || zero_run_ >= 3;
  return {reward, feedback_for_reward(reward), done_};
}

std::size_t expert_action(const Simulator& sim) {
  std::size_t best = 0;
  double best_c = -1.0;
  for (std::size_t i = 0; i < sim.catalog(); i++) {
    double c = sim.compatibility(i);
    if (c > best_c) {
      best_c = c;
      best = i;
    }
  }
  return best;
}

SessionDataset generate_synthetic_dataset(std::uint64_t seed, std::size_t sessions,
                                          std::size_t catalog, double expert_fraction) {
  if (sessions == 0 || catalog == 0)
    throw std::invalid_argument("dataset sizes must be positive");
  if (!(expert_fraction >= 0.0 && expert_fraction <= 1.0))
    throw std::invalid_argument("expert fraction must lie in [0, 1]");
  SimulatorConfig cfg;
  cfg.catalog = catalog;
  Simulator sim(cfg, seed);
  Rng policy_rng = Rng::stream(seed, 3);
  std::vector<Session> raw;
  raw.reserve(sessions);
  for (std::size_t s = 0; s < sessions; s++) {
    sim.reset(s);
    Session sess;
    sess.id = static_cast<std::int64_t>(s);
    std::int64_t ts = static_cast<std::int64_t>(s) * 10000;
    while (!sim.done()) {
      std::size_t a = policy_rng.uniform() < expert_fraction ? expert_action(sim)
                                                             : policy_rng.below(catalog);
      auto r = sim.step(a);
      ts++;
      if (r.feedback != kNoEvent) sess.events.push_back({ts, a, r.feedback});
    }
    raw.push_back(std::move(sess));
  }
  return finalize_dataset(std::move(raw));
}

}  // namespace gumbelrec
