// SPDX-License-Identifier: Apache-2.0
//
// Operational surface: prepare-data, train, evaluate, verify-consistency,
// report. Train and evaluate accept an optional config file plus --key value
// overrides for every run-config key; every command is deterministic under
// its config and seed. Exit code 0 on success, otherwise one categorized
// error line on stderr.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gumbelrec/checkpoint.hpp"
#include "gumbelrec/config.hpp"
#include "gumbelrec/encoder.hpp"
#include "gumbelrec/env.hpp"
#include "gumbelrec/gumbel.hpp"
#include "gumbelrec/metrics.hpp"
#include "gumbelrec/reward.hpp"
#include "gumbelrec/scm.hpp"
#include "gumbelrec/trainer.hpp"

namespace gr = gumbelrec;
namespace fs = std::filesystem;

namespace {

struct CommandError : std::runtime_error {
  std::string category;
  CommandError(std::string cat, const std::string& msg)
      : std::runtime_error(msg), category(std::move(cat)) {}
};

[[noreturn]] void fail(const std::string& category, const std::string& msg) {
  throw CommandError(category, msg);
}

// Tags any exception escaping `f` with an error category for the exit path.
template <class F>
auto stage(const char* category, F&& f) {
  try {
    return f();
  } catch (const CommandError&) {
    throw;
  } catch (const std::exception& e) {
    throw CommandError(category, e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

fs::path resolve_output_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  const char* root = std::getenv("GUMBELREC_OUTPUT_ROOT");
  if (root != nullptr && *root != '\0' && p.is_relative()) p = fs::path(root) / p;
  return p;
}

void write_text_file(const fs::path& path, const std::string& text) {
  stage("io", [&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
  });
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
  std::string input;
  bool synthetic = false;
  std::uint64_t seed = 1;
  std::uint64_t sessions = 500;
  std::uint64_t catalog = 200;
  double expert_fraction = 0.1;
  std::string output;
};

int run_prepare(const PrepareArgs& a) {
  if (a.input.empty() && !a.synthetic) fail("usage", "prepare-data needs --input PATH or --synthetic");
  if (!a.input.empty() && a.synthetic) fail("usage", "--input and --synthetic are mutually exclusive");
  gr::SessionDataset data = stage("data", [&] {
    return a.synthetic
               ? gr::generate_synthetic_dataset(a.seed, a.sessions, a.catalog, a.expert_fraction)
               : gr::load_sessions(a.input, gr::default_behavior_mapping());
  });
  stage("io", [&] { gr::write_sessions(data, a.output); });

  nlohmann::ordered_json stats;
  stats["dataset"] = fs::path(a.output).filename().string();
  stats["sessions"] = data.sessions.size();
  stats["items"] = data.stats.items;
  stats["interactions"] = data.stats.interactions;
  stats["clicks"] = data.stats.clicks;
  stats["purchases"] = data.stats.purchases;
  std::string line = stats.dump() + "\n";
  write_text_file(a.output + ".stats", line);
  std::cout << line;
  std::cout << "wrote " << a.output << '\n';
  std::cout << "wrote " << a.output << ".stats\n";
  return 0;
}

// ------------------------------------------------------------------ train

using Overrides = std::vector<std::pair<std::string, std::string>>;

void add_config_overrides(CLI::App* cmd, Overrides& sink) {
  for (const std::string& key : gr::config_keys()) {
    cmd->add_option_function<std::string>(
           "--" + key,
           [&sink, key](const std::string& value) { sink.emplace_back(key, value); },
           "override config key " + key)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
}

gr::RunConfig resolved_config(const std::string& config_file, const Overrides& overrides) {
  gr::RunConfig cfg;
  if (!config_file.empty()) {
    cfg = stage("config", [&] { return gr::load_config_file(config_file); });
  }
  stage("config", [&] {
    for (const auto& [key, value] : overrides) gr::apply_config_override(cfg, key, value);
    gr::validate_config(cfg);
  });
  return cfg;
}

std::string render_curve_svg(const std::string& metric,
                             const std::vector<std::pair<double, double>>& pts);

struct TrainArgs {
  std::string config_file;
  Overrides overrides;
  bool echo = false;
};

int run_train(const TrainArgs& a) {
  gr::RunConfig cfg = resolved_config(a.config_file, a.overrides);
  if (a.echo) {
    std::cout << gr::serialize_config(cfg);
    return 0;
  }

  std::optional<gr::SessionDataset> full;
  gr::SessionDataset train_split;
  const gr::SessionDataset* train_data = nullptr;
  if (!cfg.dataset_path.empty()) {
    full = stage("data",
                 [&] { return gr::load_sessions(cfg.dataset_path, gr::default_behavior_mapping()); });
    auto parts = stage("data", [&] { return gr::split_sessions(*full, cfg.test_fraction, cfg.seed); });
    train_split = std::move(parts.first);
    train_data = &train_split;
  }

  fs::path outdir = resolve_output_dir(cfg.output_dir);
  stage("io", [&] { fs::create_directories(outdir); });
  fs::path ck_path = outdir / "checkpoint.bin";
  auto save = [&](std::uint64_t iteration, const gr::Model& model, std::uint64_t episodes) {
    stage("checkpoint", [&] {
      gr::Checkpoint ck;
      ck.config = cfg;
      ck.catalog = model.encoder.catalog;
      ck.iteration = iteration;
      ck.episodes = episodes;
      ck.model = model;
      gr::save_checkpoint(ck_path.string(), ck);
    });
  };

  std::cout << "train optimizer=" << cfg.optimizer << " env=" << cfg.env << " iterations="
            << cfg.iterations << '\n';
  gr::TrainResult res = stage("train", [&] { return gr::train(cfg, train_data, save); });
  save(res.iterations_done, res.model, res.episodes_consumed);

  std::string log_text;
  for (const auto& rec : res.log) log_text += gr::metric_record_line(rec);
  fs::path log_path = outdir / "metrics.log";
  write_text_file(log_path, log_text);
  fs::path cfg_path = outdir / "run_config.txt";
  write_text_file(cfg_path, gr::serialize_config(cfg));

  std::vector<std::string> order;
  std::map<std::string, double> last;
  for (const auto& rec : res.log) {
    if (last.find(rec.metric) == last.end()) order.push_back(rec.metric);
    last[rec.metric] = rec.value;
  }
  std::cout << "iterations " << res.iterations_done << ", episodes " << res.episodes_consumed << '\n';
  for (const auto& name : order) std::cout << "final " << name << ' ' << fmt(last[name]) << '\n';

  if (cfg.emit_plot) {
    std::string metric = last.count("ctr") ? "ctr" : "mean_step_reward";
    std::vector<std::pair<double, double>> pts;
    for (const auto& rec : res.log) {
      if (rec.metric == metric) pts.emplace_back(double(rec.iteration), rec.value);
    }
    if (!pts.empty()) {
      fs::path svg_path = outdir / (metric + ".svg");
      write_text_file(svg_path, render_curve_svg(metric, pts));
      std::cout << "wrote " << svg_path.string() << '\n';
    }
  }
  std::cout << "wrote " << ck_path.string() << '\n';
  std::cout << "wrote " << log_path.string() << " (" << res.log.size() << " records)\n";
  std::cout << "wrote " << cfg_path.string() << '\n';
  return 0;
}

// --------------------------------------------------------------- evaluate

// Evaluation episode keys sit far above the training range so scored users
// are never ones the policy trained on.
constexpr std::uint64_t kEvalEpisodeBase = 1000000000;
constexpr std::uint64_t kEvalActionKey = 101;

struct EvalArgs {
  std::string checkpoint;
  std::string split = "test";
  std::string out;
  Overrides overrides;
};

int run_evaluate(const EvalArgs& a) {
  gr::Checkpoint ck = stage("checkpoint", [&] { return gr::load_checkpoint(a.checkpoint); });
  gr::RunConfig cfg = ck.config;
  stage("config", [&] {
    for (const auto& [key, value] : a.overrides) gr::apply_config_override(cfg, key, value);
    gr::validate_config(cfg);
  });
  if (a.split != "train" && a.split != "test") fail("usage", "--split must be train or test");

  std::vector<gr::MetricRecord> recs;
  auto push = [&](const std::string& name, double value, const std::string& split, int cls) {
    gr::MetricRecord r;
    r.iteration = ck.iteration;
    r.metric = name;
    r.value = value;
    r.split = split;
    r.feedback_class = cls;
    recs.push_back(std::move(r));
  };

  if (cfg.env == "simulator") {
    stage("eval", [&] {
      push("ctr", gr::evaluate_ctr(ck.model, cfg, kEvalEpisodeBase, cfg.eval_episodes, kEvalActionKey),
           "eval", -1);
      push("ctr_random", gr::random_ctr(cfg, kEvalEpisodeBase, cfg.eval_episodes, kEvalActionKey),
           "eval", -1);
    });
  } else {
    if (cfg.dataset_path.empty()) fail("config", "replay evaluation requires dataset_path");
    gr::SessionDataset data = stage("data", [&] {
      return gr::load_sessions(cfg.dataset_path, gr::default_behavior_mapping());
    });
    auto parts = stage("data", [&] { return gr::split_sessions(data, cfg.test_fraction, cfg.seed); });
    const gr::SessionDataset& split = a.split == "train" ? parts.first : parts.second;
    if (split.sessions.empty()) fail("data", "selected split has no sessions");

    std::size_t max_k = std::min<std::size_t>(10, split.catalog);
    auto records = stage("eval", [&] { return gr::replay_rankings(ck.model, cfg, split, max_k); });
    if (records.empty()) fail("data", "no events with history to score");
    auto emit = [&](const std::vector<gr::RankingRecord>& rs, int cls) {
      push("count", double(rs.size()), a.split, cls);
      for (std::size_t k : {std::size_t{5}, std::size_t{10}}) {
        if (k > max_k) continue;
        push("hr@" + std::to_string(k), gr::hit_ratio_at_k(rs, k), a.split, cls);
        push("ndcg@" + std::to_string(k), gr::ndcg_at_k(rs, k), a.split, cls);
      }
    };
    emit(records, -1);
    for (const auto& [cls, rs] : gr::partition_by_feedback(records)) emit(rs, cls);
  }

  std::string text;
  for (const auto& r : recs) text += gr::metric_record_line(r);
  std::cout << text;
  if (!a.out.empty()) {
    write_text_file(a.out, text);
    std::cout << "wrote " << a.out << '\n';
  }
  return 0;
}

// ---------------------------------------------------- verify-consistency

struct VerifyArgs {
  std::uint64_t trials = 1000;
  std::uint64_t samples = 200000;
  std::uint64_t min_dim = 2;
  std::uint64_t max_dim = 5;
  std::uint64_t seed = 1;
  bool contrast = false;
  std::string checkpoint;
  std::uint64_t head_pairs = 100;
  std::uint64_t tables = 1;
};

struct VerifyTotals {
  std::uint64_t trials = 0;
  std::uint64_t antecedent_pairs = 0;
  std::uint64_t violations = 0;
  std::uint64_t skipped = 0;
  std::uint64_t positive_pn = 0;
  std::uint64_t reverse_holds = 0;
  double max_pn = 0.0;
  double tolerance_at_max = 0.0;
};

void absorb(VerifyTotals& t, const gr::ConsistencyReport& r) {
  t.trials++;
  t.antecedent_pairs += r.antecedent_pairs;
  t.violations += r.violations;
  t.skipped += r.skipped;
  t.positive_pn += r.positive_pn_pairs;
  t.reverse_holds += r.reverse_holds_pairs;
  if (r.antecedent_holds && r.pn_estimate >= t.max_pn) {
    t.max_pn = r.pn_estimate;
    t.tolerance_at_max = r.tolerance;
  }
}

void print_totals(const std::string& title, const VerifyTotals& t, std::uint64_t samples,
                  bool shared) {
  std::cout << title << ": trials " << t.trials << ", samples " << samples << ", coupling "
            << (shared ? "shared" : "independent") << '\n';
  std::cout << "  antecedent pairs " << t.antecedent_pairs << ", violations " << t.violations
            << ", inestimable " << t.skipped << '\n';
  std::cout << "  largest antecedent pn " << fmt(t.max_pn) << " (tolerance "
            << fmt(t.tolerance_at_max) << ")\n";
  std::cout << "  reverse direction: positive-pn pairs " << t.positive_pn
            << ", strict inequality holds " << t.reverse_holds << '\n';
}

// PN(counterfactual = j | factual = i) tallied over Monte-Carlo draws.
std::vector<double> pn_table(const std::vector<double>& f, const std::vector<double>& cf,
                             std::size_t samples, std::uint64_t seed, bool shared) {
  std::size_t dim = f.size();
  std::vector<std::uint64_t> joint(dim * dim, 0), marg(dim, 0);
  for (std::size_t i = 0; i < samples; i++) {
    gr::Rng rng = gr::Rng::stream(seed, 43, i);
    std::vector<double> g = gr::sample_gumbel(rng, dim);
    std::size_t rf = gr::gumbel_max_select(f, g);
    std::vector<double> g2 = shared ? g : gr::sample_gumbel(rng, dim);
    std::size_t rc = gr::gumbel_max_select(cf, g2);
    joint[rf * dim + rc]++;
    marg[rf]++;
  }
  std::vector<double> t(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; i++) {
    for (std::size_t j = 0; j < dim; j++) {
      if (marg[i] > 0) t[i * dim + j] = double(joint[i * dim + j]) / double(marg[i]);
    }
  }
  return t;
}

void print_pn_table(const std::string& title, const std::vector<double>& f,
                    const std::vector<double>& cf, std::size_t samples, std::uint64_t seed,
                    bool shared) {
  auto t = pn_table(f, cf, samples, seed, shared);
  std::size_t dim = f.size();
  std::cout << title << " (row = factual outcome, column = counterfactual outcome)\n";
  for (std::size_t i = 0; i < dim; i++) {
    std::cout << " ";
    for (std::size_t j = 0; j < dim; j++) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), " %.4f", t[i * dim + j]);
      std::cout << buf;
    }
    std::cout << '\n';
  }
}

int run_verify(const VerifyArgs& a) {
  if (a.trials == 0) fail("usage", "--trials must be at least 1");
  if (a.min_dim < 2 || a.max_dim < a.min_dim) fail("usage", "need 2 <= min-dim <= max-dim");
  if (a.samples == 0) fail("usage", "--samples must be at least 1");
  bool shared = !a.contrast;
  auto coupling = shared ? gr::NoiseCoupling::shared : gr::NoiseCoupling::independent;

  auto random_pair = [&](std::uint64_t t) {
    gr::Rng rng = gr::Rng::stream(a.seed, 31, t);
    std::size_t dim = a.min_dim + rng.below(a.max_dim - a.min_dim + 1);
    std::vector<double> f(dim), cf(dim);
    for (double& v : f) v = 4.0 * rng.uniform() - 2.0;
    for (double& v : cf) v = 4.0 * rng.uniform() - 2.0;
    return std::make_pair(f, cf);
  };
  auto noise_seed = [&](std::uint64_t purpose, std::uint64_t t) {
    return gr::Rng::stream(a.seed, purpose, t).next_u64();
  };

  VerifyTotals random_totals;
  for (std::uint64_t t = 0; t < a.trials; t++) {
    auto [f, cf] = random_pair(t);
    absorb(random_totals, gr::verify_gumbel_consistency(f, cf, a.samples, noise_seed(41, t), coupling));
    if (t < a.tables) {
      print_pn_table("pn table, random pair " + std::to_string(t), f, cf,
                     std::min<std::size_t>(a.samples, 200000), noise_seed(41, t), shared);
    }
  }
  print_totals("random logit pairs", random_totals, a.samples, shared);

  auto [ident, ignored] = random_pair(0);
  (void)ignored;
  std::size_t diag_samples = std::min<std::size_t>(a.samples, 100000);
  auto diag = pn_table(ident, ident, diag_samples, noise_seed(53, 0), shared);
  double diag_min = 1.0;
  for (std::size_t i = 0; i < ident.size(); i++) diag_min = std::min(diag_min, diag[i * ident.size() + i]);
  print_pn_table("pn table, identical logits", ident, ident, diag_samples, noise_seed(53, 0), shared);
  std::cout << "identical-logit diagonal minimum " << fmt(diag_min) << '\n';

  if (!a.checkpoint.empty()) {
    gr::Checkpoint ck = stage("checkpoint", [&] { return gr::load_checkpoint(a.checkpoint); });
    const gr::EncoderParams& enc = ck.model.encoder;
    if (enc.catalog < 2) fail("data", "checkpoint catalog is too small for action contrasts");
    auto emb = [&](std::size_t item) {
      const double* row = enc.item_emb.row(item + 1);
      return std::vector<double>(row, row + enc.d);
    };
    VerifyTotals head_totals;
    bool printed = false;
    for (std::uint64_t t = 0; t < a.head_pairs; t++) {
      gr::Rng rng = gr::Rng::stream(a.seed, 37, t);
      gr::HistoryPrefix prefix;
      std::size_t len = rng.below(enc.window + 1);
      for (std::size_t i = 0; i < len; i++) {
        prefix.push_back({rng.below(enc.catalog), rng.below(2)});
      }
      std::vector<double> s = gr::encode_state(prefix, enc);
      std::size_t a1 = rng.below(enc.catalog);
      std::size_t a2 = rng.below(enc.catalog - 1);
      if (a2 >= a1) a2++;
      std::vector<double> f = gr::reward_logits(ck.model.reward, s, emb(a1));
      std::vector<double> cf = gr::reward_logits(ck.model.reward, s, emb(a2));
      absorb(head_totals, gr::verify_gumbel_consistency(f, cf, a.samples, noise_seed(47, t), coupling));
      if (!printed) {
        print_pn_table("pn table, reward-head pair 0", f, cf,
                       std::min<std::size_t>(a.samples, 200000), noise_seed(47, t), shared);
        printed = true;
      }
    }
    print_totals("reward-head logit pairs", head_totals, a.samples, shared);
  }

  std::uint64_t violations = random_totals.violations;
  if (shared) {
    std::cout << (violations == 0 ? "consistency holds (0 violations)"
                                  : "consistency violated (" + std::to_string(violations) +
                                        " antecedent pairs above tolerance)")
              << '\n';
  } else {
    std::cout << "independent-noise contrast: " << violations
              << " violations (nonzero expected; the theorem needs shared noise)\n";
  }
  return 0;
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::string log;
  std::string metric = "ctr";
  std::string plot;
};

struct LogRow {
  std::uint64_t iteration = 0;
  std::uint64_t wall_ms = 0;
  std::string metric;
  double value = 0.0;
  std::string split;
  int feedback_class = -1;
};

std::vector<LogRow> read_metric_log(const std::string& path) {
  return stage("data", [&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open metric log: " + path);
    std::vector<LogRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      line_no++;
      if (line.empty()) continue;
      try {
        nlohmann::json j = nlohmann::json::parse(line);
        LogRow r;
        r.iteration = j.at("iteration").get<std::uint64_t>();
        r.wall_ms = j.at("wall_ms").get<std::uint64_t>();
        r.metric = j.at("metric").get<std::string>();
        r.value = j.at("value").get<double>();
        r.split = j.at("split").get<std::string>();
        r.feedback_class = j.at("feedback_class").get<int>();
        rows.push_back(std::move(r));
      } catch (const std::exception& e) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (rows.empty()) throw std::runtime_error("metric log is empty: " + path);
    return rows;
  });
}

std::string render_curve_svg(const std::string& metric,
                             const std::vector<std::pair<double, double>>& pts) {
  const double left = 60.0, right = 780.0, top = 30.0, bottom = 360.0;
  double x0 = pts.front().first, x1 = x0, v0 = pts.front().second, v1 = v0;
  for (const auto& [x, v] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
  }
  double xspan = x1 > x0 ? x1 - x0 : 1.0;
  double vspan = v1 > v0 ? v1 - v0 : 1.0;
  auto px = [&](double x) { return left + (x - x0) / xspan * (right - left); };
  auto py = [&](double v) { return bottom - (v - v0) / vspan * (bottom - top); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
       "viewBox=\"0 0 800 400\">\n";
  s << "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
  s << "<line x1=\"60\" y1=\"360\" x2=\"780\" y2=\"360\" stroke=\"black\"/>\n";
  s << "<line x1=\"60\" y1=\"30\" x2=\"60\" y2=\"360\" stroke=\"black\"/>\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "<text x=\"420\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">%s</text>\n",
                metric.c_str());
  s << buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"60\" y=\"378\" font-size=\"11\">%s</text>\n",
                fmt(x0).c_str());
  s << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"780\" y=\"378\" text-anchor=\"end\" font-size=\"11\">%s</text>\n",
                fmt(x1).c_str());
  s << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"55\" y=\"364\" text-anchor=\"end\" font-size=\"11\">%s</text>\n",
                fmt(v0).c_str());
  s << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"55\" y=\"38\" text-anchor=\"end\" font-size=\"11\">%s</text>\n",
                fmt(v1).c_str());
  s << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"420\" y=\"395\" text-anchor=\"middle\" font-size=\"11\">iteration</text>\n");
  s << buf;
  s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); i++) {
    std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i == 0 ? "" : " ", px(pts[i].first),
                  py(pts[i].second));
    s << buf;
  }
  s << "\"/>\n</svg>\n";
  return s.str();
}

int run_report(const ReportArgs& a) {
  std::vector<LogRow> rows = read_metric_log(a.log);

  struct Agg {
    std::size_t n = 0;
    double first = 0.0, last = 0.0, mn = 0.0, mx = 0.0, sum = 0.0;
  };
  std::map<std::tuple<std::string, std::string, int>, Agg> groups;
  for (const LogRow& r : rows) {
    Agg& g = groups[{r.metric, r.split, r.feedback_class}];
    if (g.n == 0) {
      g.first = g.mn = g.mx = r.value;
    }
    g.last = r.value;
    g.mn = std::min(g.mn, r.value);
    g.mx = std::max(g.mx, r.value);
    g.sum += r.value;
    g.n++;
  }

  std::cout << rows.size() << " records, iterations " << rows.front().iteration << ".."
            << rows.back().iteration << '\n';
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %-6s %-5s %6s %10s %10s %10s %10s %10s\n", "metric",
                "split", "class", "count", "first", "last", "min", "max", "mean");
  std::cout << buf;
  for (const auto& [key, g] : groups) {
    const auto& [metric, split, cls] = key;
    std::string cls_text = cls < 0 ? "-" : std::to_string(cls);
    std::snprintf(buf, sizeof(buf), "%-18s %-6s %-5s %6zu %10s %10s %10s %10s %10s\n",
                  metric.c_str(), split.c_str(), cls_text.c_str(), g.n, fmt(g.first).c_str(),
                  fmt(g.last).c_str(), fmt(g.mn).c_str(), fmt(g.mx).c_str(),
                  fmt(g.sum / double(g.n)).c_str());
    std::cout << buf;
  }

  if (!a.plot.empty()) {
    std::vector<std::pair<double, double>> pts;
    for (const LogRow& r : rows) {
      if (r.metric == a.metric && r.feedback_class == -1) {
        pts.emplace_back(double(r.iteration), r.value);
      }
    }
    if (pts.empty()) fail("data", "metric '" + a.metric + "' not found in log");
    write_text_file(a.plot, render_curve_svg(a.metric, pts));
    std::cout << "wrote " << a.plot << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual-consistent recommender toolkit"};
  app.require_subcommand(1);

  PrepareArgs prep;
  CLI::App* prep_cmd =
      app.add_subcommand("prepare-data", "filter a session log or generate a synthetic one");
  prep_cmd->add_option("--input", prep.input,
                       "session log with 'session_id timestamp item_id behavior' rows");
  prep_cmd->add_flag("--synthetic", prep.synthetic, "generate a synthetic session log instead");
  prep_cmd->add_option("--seed", prep.seed, "synthetic generation seed");
  prep_cmd->add_option("--sessions", prep.sessions, "synthetic session count");
  prep_cmd->add_option("--catalog", prep.catalog, "synthetic catalog size");
  prep_cmd->add_option("--expert-fraction", prep.expert_fraction,
                       "expert share of synthetic actions");
  prep_cmd->add_option("--output", prep.output, "filtered dataset path")->required();

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "run the alternating adversarial/policy loop");
  train_cmd->add_option("--config", tr.config_file, "config file (key = value lines)");
  train_cmd->add_flag("--echo-config", tr.echo, "print the resolved config and exit");
  add_config_overrides(train_cmd, tr.overrides);

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "score a checkpoint: replay ranking metrics or simulator ctr");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "checkpoint path")->required();
  eval_cmd->add_option("--split", ev.split, "replay split to score: train or test");
  eval_cmd->add_option("--out", ev.out, "also write the metric records to this file");
  add_config_overrides(eval_cmd, ev.overrides);

  VerifyArgs vf;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify-consistency", "check the counterfactual-consistency theorem by monte carlo");
  verify_cmd->add_option("--trials", vf.trials, "random logit pairs to test");
  verify_cmd->add_option("--samples", vf.samples, "monte-carlo draws per pair");
  verify_cmd->add_option("--min-dim", vf.min_dim, "smallest outcome count");
  verify_cmd->add_option("--max-dim", vf.max_dim, "largest outcome count");
  verify_cmd->add_option("--seed", vf.seed, "trial seed");
  verify_cmd->add_flag("--contrast", vf.contrast,
                       "use independent noise per world (breaks the theorem)");
  verify_cmd->add_option("--checkpoint", vf.checkpoint,
                         "also test the trained reward head at sampled state/action pairs");
  verify_cmd->add_option("--head-pairs", vf.head_pairs, "state/action pairs for checkpoint mode");
  verify_cmd->add_option("--tables", vf.tables, "print pn tables for the first N random pairs");

  ReportArgs rp;
  CLI::App* report_cmd = app.add_subcommand("report", "summarize a metric log");
  report_cmd->add_option("--log", rp.log, "metric log path")->required();
  report_cmd->add_option("--metric", rp.metric, "metric to plot");
  report_cmd->add_option("--plot", rp.plot, "write a value-vs-iteration svg curve here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (prep_cmd->parsed()) return run_prepare(prep);
    if (train_cmd->parsed()) return run_train(tr);
    if (eval_cmd->parsed()) return run_evaluate(ev);
    if (verify_cmd->parsed()) return run_verify(vf);
    if (report_cmd->parsed()) return run_report(rp);
  } catch (const CommandError& e) {
    std::cerr << e.category << " error: " << e.what() << '\n';
    return e.category == "usage" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
