// SPDX-License-Identifier: Apache-2.0
#include "gumbelrec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "gumbelrec/gumbel.hpp"
#include "gumbelrec/kernels.hpp"
#include "gumbelrec/numeric.hpp"
#include "gumbelrec/optim.hpp"
#include "gumbelrec/rl.hpp"
#include "gumbelrec/scm.hpp"

namespace gumbelrec {
namespace {

// base keys for derived rng streams
constexpr std::uint64_t kInitKey = 11;
constexpr std::uint64_t kDiscBatchKey = 13;
constexpr std::uint64_t kDiscNoiseKey = 17;
constexpr std::uint64_t kRolloutKey = 19;

template <class P>
void add_scaled(P& dst, const P& src, double c) {
  std::vector<const std::vector<double>*> srcs;
  src.visit([&](const std::string&, const std::vector<double>& v) { srcs.push_back(&v); });
  std::size_t i = 0;
  dst.visit([&](const std::string&, std::vector<double>& v) {
    const auto& s = *srcs[i++];
    kernels::axpy(c, s.data(), v.data(), v.size());
  });
}

template <class P>
void negate(P& p) {
  p.visit([](const std::string&, std::vector<double>& v) {
    for (auto& x : v) x = -x;
  });
}

int feedback_class(int env_feedback) {
  if (env_feedback == kClick) return static_cast<int>(kFeedbackClick);
  if (env_feedback == kPurchase) return static_cast<int>(kFeedbackPurchase);
  return static_cast<int>(kFeedbackNone);
}

double predefined_bonus(const RunConfig& cfg, int observed) {
  if (!cfg.predefined_feedback) return 0.0;
  if (observed == static_cast<int>(kFeedbackClick)) return cfg.click_bonus;
  if (observed == static_cast<int>(kFeedbackPurchase)) return cfg.purchase_bonus;
  return 0.0;
}

struct EpisodeStep {
  std::vector<double> state;
  std::size_t action = 0;
  int observed = 0;    // feedback class
  double reward = 0.0; // discriminator reward (+ optional bonus)
  double logp_old = 0.0;
};

struct Episode {
  std::vector<EpisodeStep> steps;
  double env_reward = 0.0;  // raw simulator reward sum, 0 on replay
  std::size_t env_steps = 0;
};

// observational record before encoding
struct RecordSpec {
  HistoryPrefix prefix;
  std::size_t action = 0;
  int observed = 0;
};

std::vector<double> value_scores(const Model& m, const std::vector<double>& state,
                                 std::size_t catalog, std::vector<CriticTrace>* traces) {
  std::vector<double> vals(catalog);
  if (traces) traces->assign(catalog, CriticTrace{});
  for (std::size_t j = 0; j < catalog; j++) {
    const double* emb = m.encoder.item_emb.row(j + 1);
    vals[j] = critic_value(m.critic, state.data(), emb, traces ? &(*traces)[j] : nullptr);
  }
  return vals;
}

std::size_t pick_action(const Model& m, const RunConfig& cfg, const std::vector<double>& state,
                        std::size_t catalog, Rng& rng, double* logp_out) {
  if (cfg.optimizer == "td") {
    // Boltzmann exploration: Gumbel-max over V(s, .) / action temperature
    auto vals = value_scores(m, state, catalog, nullptr);
    for (auto& v : vals) v /= cfg.action_temperature;
    auto noise = sample_gumbel(rng, catalog);
    if (logp_out) *logp_out = 0.0;
    return gumbel_max_select(vals, noise);
  }
  auto scores = score_catalog(m.policy, state.data(), m.encoder.item_emb, 1, catalog);
  std::vector<double> log_h(catalog);
  for (std::size_t j = 0; j < catalog; j++) log_h[j] = std::log(scores[j]);
  auto noise = sample_gumbel(rng, catalog);
  std::size_t a = gumbel_max_select(log_h, noise);
  if (logp_out) *logp_out = policy_logprob(scores, a);
  return a;
}

Episode roll_simulator_episode(const Model& m, const RunConfig& cfg, Simulator& sim,
                               std::uint64_t episode_key, Rng& rng) {
  Episode ep;
  sim.reset(episode_key);
  HistoryPrefix history;
  while (!sim.done()) {
    EpisodeStep st;
    st.state = encode_state(history, m.encoder);
    st.action = pick_action(m, cfg, st.state, sim.catalog(), rng, &st.logp_old);
    auto res = sim.step(st.action);
    st.observed = feedback_class(res.feedback);
    const double* emb = m.encoder.item_emb.row(st.action + 1);
    std::vector<double> aemb(emb, emb + m.encoder.d);
    st.reward = discriminator_reward(m.reward, st.state, aemb, rng, cfg.gumbel_reward) +
                predefined_bonus(cfg, st.observed);
    history.push_back({st.action, st.observed == static_cast<int>(kFeedbackNone) ? 0u : 1u});
    ep.steps.push_back(std::move(st));
  }
  ep.env_reward = sim.episode_reward();
  ep.env_steps = sim.steps();
  return ep;
}

Episode episode_from_session(const Model& m, const RunConfig& cfg, const Session& session,
                             std::size_t catalog, Rng& rng) {
  Episode ep;
  HistoryPrefix history;
  for (const auto& ev : session.events) {
    EpisodeStep st;
    st.state = encode_state(history, m.encoder);
    st.action = ev.item;
    st.observed = feedback_class(ev.feedback);
    const double* emb = m.encoder.item_emb.row(st.action + 1);
    std::vector<double> aemb(emb, emb + m.encoder.d);
    st.reward = discriminator_reward(m.reward, st.state, aemb, rng, cfg.gumbel_reward) +
                predefined_bonus(cfg, st.observed);
    if (cfg.optimizer == "ppo") {
      auto scores = score_catalog(m.policy, st.state.data(), m.encoder.item_emb, 1, catalog);
      st.logp_old = policy_logprob(scores, st.action);
    }
    history.push_back({st.action, 1});
    ep.steps.push_back(std::move(st));
  }
  return ep;
}

struct Trainer {
  const RunConfig& cfg;
  const SessionDataset* dataset;
  std::size_t catalog;
  Model model;
  Simulator sim;

  Adam head_opt;
  Adam enc_opt;
  Adam actor_opt;
  Adam critic_opt;

  std::vector<std::pair<std::size_t, std::size_t>> event_index;  // (session, event)
  std::uint64_t episode_counter = 0;

  Trainer(const RunConfig& c, const SessionDataset* ds, std::size_t cat)
      : cfg(c),
        dataset(ds),
        catalog(cat),
        sim(SimulatorConfig{cat, static_cast<std::size_t>(c.sim_clusters),
                            static_cast<std::size_t>(c.max_steps), c.sim_drift},
            c.seed),
        head_opt(c.disc_lr),
        enc_opt(c.disc_lr),
        actor_opt(c.actor_lr),
        critic_opt(c.critic_lr) {
    Rng init_rng = Rng::stream(cfg.seed, kInitKey);
    model = init_model(cfg, catalog, init_rng);
    if (dataset) {
      for (std::size_t s = 0; s < dataset->sessions.size(); s++) {
        for (std::size_t e = 0; e < dataset->sessions[s].events.size(); e++) {
          event_index.emplace_back(s, e);
        }
      }
    }
  }

  std::vector<RecordSpec> observational_batch(Rng& rng) {
    std::vector<RecordSpec> specs;
    std::size_t want = cfg.batch_size;
    if (dataset) {
      specs.reserve(want);
      for (std::size_t i = 0; i < want; i++) {
        auto [s, e] = event_index[rng.below(event_index.size())];
        const auto& events = dataset->sessions[s].events;
        RecordSpec spec;
        for (std::size_t j = 0; j < e; j++) spec.prefix.push_back({events[j].item, 1});
        spec.action = events[e].item;
        spec.observed = feedback_class(events[e].feedback);
        specs.push_back(std::move(spec));
      }
      return specs;
    }
    // No logged data: roll the current policy and keep the steps a log would
    // have kept, the ones with feedback. The none steps still extend the
    // history prefix.
    std::size_t rolled = 0;
    const std::size_t episode_cap = 50 + 10 * want;
    while (specs.size() < want) {
      if (rolled++ == episode_cap) {
        if (specs.empty()) {
          throw std::runtime_error("no feedback events collected for discriminator training");
        }
        break;
      }
      Episode ep = roll_simulator_episode(model, cfg, sim, episode_counter++, rng);
      HistoryPrefix history;
      for (const auto& st : ep.steps) {
        if (st.observed != static_cast<int>(kFeedbackNone) && specs.size() < want) {
          specs.push_back({history, st.action, st.observed});
        }
        history.push_back(
            {st.action, st.observed == static_cast<int>(kFeedbackNone) ? 0u : 1u});
      }
    }
    return specs;
  }

  struct DiscStats {
    double loss = 0.0;
    double d_real = 0.0;
    double d_generated = 0.0;
  };

  DiscStats discriminator_step(std::uint64_t iter, std::uint64_t j) {
    Rng batch_rng = Rng::stream(cfg.seed, kDiscBatchKey, iter, j);
    Rng noise_rng = Rng::stream(cfg.seed, kDiscNoiseKey, iter, j);
    auto specs = observational_batch(batch_rng);

    std::vector<DiscRecord> batch(specs.size());
    std::vector<EncoderTrace> traces(specs.size());
    for (std::size_t i = 0; i < specs.size(); i++) {
      traces[i] = encode_trace(specs[i].prefix, model.encoder);
      batch[i].state = traces[i].state();
      const double* emb = model.encoder.item_emb.row(specs[i].action + 1);
      batch[i].action_emb.assign(emb, emb + model.encoder.d);
      batch[i].observed = static_cast<std::size_t>(specs[i].observed);
    }
    if (cfg.gumbel_reward) {
      sample_generated(batch, model.reward, noise_rng);
    } else {
      for (auto& rec : batch) {
        auto logp = reward_logits(model.reward, rec.state, rec.action_emb);
        rec.generated.resize(logp.size());
        for (std::size_t c = 0; c < logp.size(); c++) rec.generated[c] = std::exp(logp[c]);
      }
    }
    auto res = adversarial_losses(batch, model.reward);

    EncoderParams enc_grad = model.encoder.zeros_like();
    for (std::size_t i = 0; i < specs.size(); i++) {
      encode_backward_state(traces[i], model.encoder, res.d_state[i], enc_grad);
      kernels::add(enc_grad.item_emb.row(specs[i].action + 1), res.d_action[i].data(),
                   model.encoder.d);
    }
    head_opt.step(model.reward, res.grad);
    enc_opt.step(model.encoder, enc_grad);
    return {res.disc_loss, res.mean_d_real, res.mean_d_generated};
  }

  std::vector<Episode> collect_episodes(Rng& rng) {
    std::vector<Episode> eps;
    std::size_t n = cfg.episodes_per_iteration;
    eps.reserve(n);
    if (cfg.env == "replay") {
      for (std::size_t i = 0; i < n; i++) {
        const auto& s = dataset->sessions[rng.below(dataset->sessions.size())];
        eps.push_back(episode_from_session(model, cfg, s, catalog, rng));
      }
    } else {
      for (std::size_t i = 0; i < n; i++) {
        eps.push_back(roll_simulator_episode(model, cfg, sim, episode_counter++, rng));
      }
    }
    return eps;
  }

  double reinforce_update(const std::vector<Episode>& eps) {
    std::vector<Trajectory> trajs;
    std::vector<std::vector<double>> returns;
    double objective = 0.0;
    for (const auto& ep : eps) {
      if (ep.steps.empty()) continue;
      Trajectory t;
      std::vector<double> rewards;
      for (const auto& st : ep.steps) {
        t.push_back({st.state, st.action, st.observed, st.reward});
        rewards.push_back(st.reward);
      }
      returns.push_back(discounted_returns(rewards, cfg.discount));
      objective += returns.back().front();
      trajs.push_back(std::move(t));
    }
    if (trajs.empty()) return 0.0;
    PolicyParams g =
        reinforce_gradient(trajs, returns, model.policy, model.encoder.item_emb, 1, catalog);
    negate(g);  // ascent
    actor_opt.step(model.policy, g);
    return objective / static_cast<double>(trajs.size());
  }

  double td_update_step(const std::vector<Episode>& eps) {
    std::vector<TdTransition> batch;
    for (const auto& ep : eps) {
      for (std::size_t t = 0; t < ep.steps.size(); t++) {
        const auto& st = ep.steps[t];
        TdTransition tr;
        tr.state = st.state;
        const double* emb = model.encoder.item_emb.row(st.action + 1);
        tr.action_emb.assign(emb, emb + model.encoder.d);
        tr.reward = st.reward;
        tr.terminal = (t + 1 == ep.steps.size());
        tr.next_state = tr.terminal ? std::vector<double>(st.state.size(), 0.0)
                                    : ep.steps[t + 1].state;
        batch.push_back(std::move(tr));
      }
    }
    if (batch.empty()) return 0.0;
    TdResult res = td_update(batch, model.critic, model.encoder.item_emb, 1, catalog,
                             cfg.discount);
    if (cfg.td_supervised_ce) {
      std::vector<const EpisodeStep*> labeled;
      for (const auto& ep : eps) {
        for (const auto& st : ep.steps) {
          if (st.observed != static_cast<int>(kFeedbackNone)) labeled.push_back(&st);
        }
      }
      if (!labeled.empty()) {
        const double inv = 1.0 / static_cast<double>(labeled.size());
        std::vector<CriticTrace> traces;
        std::vector<double> probs(catalog);
        for (const auto* st : labeled) {
          auto vals = value_scores(model, st->state, catalog, &traces);
          softmax(vals.data(), probs.data(), catalog);
          for (std::size_t j = 0; j < catalog; j++) {
            double d = inv * (probs[j] - (j == st->action ? 1.0 : 0.0));
            critic_backward(model.critic, traces[j], d, res.grad, nullptr, nullptr);
          }
        }
      }
    }
    critic_opt.step(model.critic, res.grad);
    return res.loss;
  }

  double ppo_update(const std::vector<Episode>& eps) {
    // advantages and critic targets are frozen at collection values
    struct Flat {
      const EpisodeStep* st;
      double advantage;
      double target;
    };
    std::vector<Flat> flat;
    for (const auto& ep : eps) {
      if (ep.steps.empty()) continue;
      std::vector<double> rewards, values;
      for (const auto& st : ep.steps) {
        rewards.push_back(st.reward);
        values.push_back(critic_value(model.critic, st.state.data(), nullptr, nullptr));
      }
      auto adv = gae_advantages(rewards, values, cfg.discount, cfg.gae_lambda);
      auto ret = discounted_returns(rewards, cfg.discount);
      for (std::size_t t = 0; t < ep.steps.size(); t++) {
        flat.push_back({&ep.steps[t], adv[t], ret[t]});
      }
    }
    if (flat.empty()) return 0.0;
    const std::size_t n = flat.size();
    double objective = 0.0;
    for (std::uint64_t epoch = 0; epoch < cfg.ppo_epochs; epoch++) {
      std::vector<double> ratios(n), advantages(n);
      std::vector<PolicyTrace> traces(n);
      for (std::size_t i = 0; i < n; i++) {
        auto scores = score_catalog(model.policy, flat[i].st->state.data(),
                                    model.encoder.item_emb, 1, catalog, &traces[i]);
        double logp = policy_logprob(scores, flat[i].st->action);
        ratios[i] = std::exp(logp - flat[i].st->logp_old);
        advantages[i] = flat[i].advantage;
      }
      PpoResult pr = ppo_clip_loss(ratios, advantages, cfg.clip_eps);
      objective = pr.objective;
      PolicyParams g = model.policy.zeros_like();
      for (std::size_t i = 0; i < n; i++) {
        if (pr.d_ratio[i] == 0.0) continue;
        policy_logprob_backward(model.policy, traces[i], flat[i].st->action,
                                pr.d_ratio[i] * ratios[i], g);
      }
      negate(g);  // ascent
      actor_opt.step(model.policy, g);

      CriticParams cg = model.critic.zeros_like();
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; i++) {
        CriticTrace tr;
        double v = critic_value(model.critic, flat[i].st->state.data(), nullptr, &tr);
        critic_backward(model.critic, tr, 2.0 * inv * (v - flat[i].target), cg, nullptr,
                        nullptr);
      }
      critic_opt.step(model.critic, cg);
    }
    return objective;
  }
};

}  // namespace

Model init_model(const RunConfig& cfg, std::size_t catalog, Rng& rng) {
  Model m;
  const auto d = static_cast<std::size_t>(cfg.embedding_dim);
  const auto hidden = static_cast<std::size_t>(cfg.hidden);
  // Embeddings at 1/sqrt(d) so action vectors are visible to the policy and
  // critic MLPs next to the fan-in-scaled states.
  m.encoder = EncoderParams::init(catalog, d, static_cast<std::size_t>(cfg.heads),
                                  static_cast<std::size_t>(cfg.blocks),
                                  static_cast<std::size_t>(cfg.window), rng,
                                  1.0 / std::sqrt(static_cast<double>(d)));
  m.reward = RewardHead::init(d, d, hidden, 3, rng);
  m.reward.gamma_r = cfg.reward_temperature;
  m.policy = PolicyParams::init(d, d, hidden, cfg.action_temperature, rng);
  const std::size_t critic_action_dim = (cfg.optimizer == "td") ? d : 0;
  m.critic = CriticParams::init(d, critic_action_dim, hidden, rng);
  return m;
}

std::string metric_record_line(const MetricRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"iteration\":%llu,\"wall_ms\":%llu,\"metric\":\"%s\",\"value\":%.17g,"
                "\"split\":\"%s\",\"feedback_class\":%d}\n",
                static_cast<unsigned long long>(rec.iteration),
                static_cast<unsigned long long>(rec.wall_ms), rec.metric.c_str(), rec.value,
                rec.split.c_str(), rec.feedback_class);
  return buf;
}

double discriminator_reward(const RewardHead& head, const std::vector<double>& state,
                            const std::vector<double>& action_emb, Rng& rng, bool gumbel) {
  auto logp = reward_logits(head, state, action_emb);
  std::vector<double> r_tilde;
  if (gumbel) {
    auto noise = sample_gumbel(rng, head.classes);
    r_tilde = gumbel_softmax_sample(logp, noise, head.gamma_r);
  } else {
    r_tilde.resize(logp.size());
    for (std::size_t c = 0; c < logp.size(); c++) r_tilde[c] = std::exp(logp[c]);
  }
  return discriminate(head, logp, r_tilde).d;
}

TrainResult train(const RunConfig& cfg, const SessionDataset* dataset,
                  const CheckpointHook& hook) {
  validate_config(cfg);
  if (cfg.env == "replay") {
    if (!dataset) throw std::invalid_argument("replay environment requires a dataset");
    if (dataset->sessions.empty()) throw std::invalid_argument("replay dataset has no sessions");
  }
  const std::size_t catalog =
      (cfg.env == "replay") ? dataset->catalog : static_cast<std::size_t>(cfg.catalog);
  if (catalog == 0) throw std::invalid_argument("empty catalog");

  Trainer tr(cfg, dataset, catalog);
  TrainResult out;
  out.log.reserve(cfg.iterations * 6);

  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&]() -> std::uint64_t {
    if (!cfg.log_wallclock) return 0;
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count());
  };

  for (std::uint64_t iter = 0; iter < cfg.iterations; iter++) {
    Trainer::DiscStats disc{};
    for (std::uint64_t j = 0; j < cfg.disc_steps; j++) {
      auto s = tr.discriminator_step(iter, j);
      disc.loss += s.loss;
      disc.d_real += s.d_real;
      disc.d_generated += s.d_generated;
    }
    if (cfg.disc_steps > 0) {
      const double inv = 1.0 / static_cast<double>(cfg.disc_steps);
      disc.loss *= inv;
      disc.d_real *= inv;
      disc.d_generated *= inv;
    }

    double objective = 0.0;
    double step_reward_sum = 0.0;
    std::size_t step_count = 0;
    double ctr_sum = 0.0;
    std::size_t ctr_episodes = 0;
    for (std::uint64_t k = 0; k < cfg.policy_steps; k++) {
      Rng roll_rng = Rng::stream(cfg.seed, kRolloutKey, iter, k);
      auto eps = tr.collect_episodes(roll_rng);
      for (const auto& ep : eps) {
        for (const auto& st : ep.steps) step_reward_sum += st.reward;
        step_count += ep.steps.size();
        if (cfg.env == "simulator" && ep.env_steps > 0) {
          ctr_sum += ep.env_reward / (10.0 * static_cast<double>(ep.env_steps));
          ctr_episodes++;
        }
      }
      if (cfg.optimizer == "reinforce") {
        objective = tr.reinforce_update(eps);
      } else if (cfg.optimizer == "td") {
        objective = tr.td_update_step(eps);
      } else {
        objective = tr.ppo_update(eps);
      }
    }

    const std::uint64_t it = iter + 1;
    const std::uint64_t w = wall();
    auto push = [&](const char* name, double value) {
      out.log.push_back({it, w, name, value, "train", -1});
    };
    push("disc_loss", disc.loss);
    push("d_real", disc.d_real);
    push("d_generated", disc.d_generated);
    push(cfg.optimizer == "td" ? "td_loss"
                               : (cfg.optimizer == "ppo" ? "ppo_objective" : "policy_objective"),
         objective);
    push("mean_step_reward",
         step_count == 0 ? 0.0 : step_reward_sum / static_cast<double>(step_count));
    if (cfg.env == "simulator" && ctr_episodes > 0) {
      push("ctr", ctr_sum / static_cast<double>(ctr_episodes));
    }
    if (hook && it % cfg.checkpoint_every == 0) hook(it, tr.model, tr.episode_counter);
  }

  out.model = std::move(tr.model);
  out.iterations_done = cfg.iterations;
  out.episodes_consumed = tr.episode_counter;
  return out;
}

std::vector<std::size_t> rank_actions(const Model& model, const std::string& optimizer,
                                      const std::vector<double>& state, std::size_t catalog,
                                      std::size_t k) {
  if (k == 0 || k > catalog) throw std::invalid_argument("rank_actions: bad k");
  if (optimizer == "td") {
    auto vals = value_scores(model, state, catalog, nullptr);
    std::vector<std::size_t> ids(catalog);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      if (vals[a] != vals[b]) return vals[a] > vals[b];
      return a < b;
    });
    ids.resize(k);
    return ids;
  }
  Rng unused(0);
  return act(model.policy, state, model.encoder.item_emb, 1, catalog, ActMode::top_k, k,
             unused);
}

std::vector<RankingRecord> replay_rankings(const Model& model, const RunConfig& cfg,
                                           const SessionDataset& dataset, std::size_t k) {
  std::vector<RankingRecord> out;
  const std::size_t kk = std::min(k, dataset.catalog);
  for (const auto& session : dataset.sessions) {
    HistoryPrefix history;
    for (std::size_t e = 0; e < session.events.size(); e++) {
      const auto& ev = session.events[e];
      if (e > 0) {
        auto state = encode_state(history, model.encoder);
        RankingRecord rec;
        rec.ranked = rank_actions(model, cfg.optimizer, state, dataset.catalog, kk);
        rec.truth = ev.item;
        rec.feedback = ev.feedback;
        out.push_back(std::move(rec));
      }
      history.push_back({ev.item, 1});
    }
  }
  return out;
}

std::vector<double> ctr_samples(const Model& model, const RunConfig& cfg,
                                std::uint64_t key_base, std::size_t episodes,
                                std::uint64_t action_key) {
  if (episodes == 0) throw std::invalid_argument("ctr_samples: zero episodes");
  Simulator sim(SimulatorConfig{static_cast<std::size_t>(cfg.catalog),
                                static_cast<std::size_t>(cfg.sim_clusters),
                                static_cast<std::size_t>(cfg.max_steps), cfg.sim_drift},
                cfg.seed);
  std::vector<double> out;
  out.reserve(episodes);
  for (std::size_t e = 0; e < episodes; e++) {
    Rng rng = Rng::stream(cfg.seed, action_key, e);
    sim.reset(key_base + e);
    HistoryPrefix history;
    while (!sim.done()) {
      auto state = encode_state(history, model.encoder);
      std::size_t a;
      if (cfg.optimizer == "td") {
        auto vals = value_scores(model, state, sim.catalog(), nullptr);
        a = kernels::argmax(vals.data(), vals.size());
      } else {
        a = act(model.policy, state, model.encoder.item_emb, 1, sim.catalog(),
                ActMode::sample, 1, rng)[0];
      }
      auto res = sim.step(a);
      history.push_back({a, res.feedback == kNoEvent ? 0u : 1u});
    }
    out.push_back(sim.episode_reward() / (10.0 * static_cast<double>(sim.steps())));
  }
  return out;
}

double evaluate_ctr(const Model& model, const RunConfig& cfg, std::uint64_t key_base,
                    std::size_t episodes, std::uint64_t action_key) {
  auto samples = ctr_samples(model, cfg, key_base, episodes, action_key);
  double total = 0.0;
  for (double v : samples) total += v;
  return total / static_cast<double>(samples.size());
}

double random_ctr(const RunConfig& cfg, std::uint64_t key_base, std::size_t episodes,
                  std::uint64_t action_key) {
  if (episodes == 0) throw std::invalid_argument("random_ctr: zero episodes");
  Simulator sim(SimulatorConfig{static_cast<std::size_t>(cfg.catalog),
                                static_cast<std::size_t>(cfg.sim_clusters),
                                static_cast<std::size_t>(cfg.max_steps), cfg.sim_drift},
                cfg.seed);
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; e++) {
    Rng rng = Rng::stream(cfg.seed, action_key, e);
    sim.reset(key_base + e);
    while (!sim.done()) sim.step(rng.below(sim.catalog()));
    total += sim.episode_reward() / (10.0 * static_cast<double>(sim.steps()));
  }
  return total / static_cast<double>(episodes);
}

}  // namespace gumbelrec
