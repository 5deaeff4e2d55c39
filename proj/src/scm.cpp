// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/scm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gumbelrec/gumbel.hpp"
#include "gumbelrec/kernels.hpp"

namespace gumbelrec {

std::size_t gumbel_max_select(const std::vector<double>& logits,
                              const std::vector<double>& noise) {
  if (logits.size() != noise.size())
    throw std::invalid_argument("gumbel_max_select: logits and noise differ in length");
  if (logits.empty()) throw std::invalid_argument("gumbel_max_select: empty logits");
  std::size_t best = 0;
  double best_v = logits[0] + noise[0];
  if (!std::isfinite(logits[0])) throw std::invalid_argument("gumbel_max_select: non-finite logit");
  for (std::size_t i = 1; i < logits.size(); i++) {
    if (!std::isfinite(logits[i]))
      throw std::invalid_argument("gumbel_max_select: non-finite logit");
    double v = logits[i] + noise[i];
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

std::size_t Scm::add_node(std::string name, std::size_t cardinality,
                          std::vector<std::size_t> parents, Mat logits) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
    throw std::invalid_argument("node name must be non-empty and whitespace-free");
  if (cardinality == 0) throw std::invalid_argument("node cardinality must be positive");
  std::size_t rows = 1;
  for (auto p : parents) {
    if (p >= nodes_.size()) throw std::invalid_argument("parent index out of range: " + name);
    rows *= nodes_[p].cardinality;
  }
  if (logits.rows != rows || logits.cols != cardinality)
    throw std::invalid_argument("logit table shape mismatch for node " + name);
  for (double v : logits.data)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite logit in node " + name);
  nodes_.push_back(ScmNode{std::move(name), cardinality, std::move(parents), std::move(logits)});
  return nodes_.size() - 1;
}

std::size_t Scm::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); i++)
    if (nodes_[i].name == name) return i;
  throw std::out_of_range("no such node: " + name);
}

NoiseDraw Scm::draw_noise(std::uint64_t seed, std::uint64_t sample_index) const {
  NoiseDraw nd;
  nd.g.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); i++) {
    Rng rng = Rng::stream(seed, sample_index, static_cast<std::uint64_t>(i));
    nd.g[i].resize(nodes_[i].cardinality);
    sample_gumbel(rng, nd.g[i].data(), nodes_[i].cardinality);
  }
  return nd;
}

std::size_t Scm::parent_row(const ScmNode& n, const std::vector<std::size_t>& values) const {
  std::size_t row = 0;
  for (auto p : n.parents) row = row * nodes_[p].cardinality + values[p];
  return row;
}

std::vector<std::size_t> Scm::evaluate(const std::vector<Intervention>& interventions,
                                       const NoiseDraw& noise) const {
  if (noise.g.size() != nodes_.size())
    throw std::invalid_argument("noise draw does not match model");
  std::vector<std::size_t> values(nodes_.size());
  std::vector<double> perturbed;
  for (std::size_t i = 0; i < nodes_.size(); i++) {
    const ScmNode& n = nodes_[i];
    const Intervention* iv = nullptr;
    for (const auto& cand : interventions)
      if (cand.node == i) iv = &cand;
    if (iv != nullptr) {
      if (iv->value >= n.cardinality)
        throw std::invalid_argument("intervention value out of range for node " + n.name);
      values[i] = iv->value;
      continue;
    }
    const double* row = n.logits.row(parent_row(n, values));
    const double* g = noise.g[i].data();
    perturbed.resize(n.cardinality);
    for (std::size_t c = 0; c < n.cardinality; c++) perturbed[c] = row[c] + g[c];
    values[i] = kernels::argmax(perturbed.data(), n.cardinality);
  }
  return values;
}

std::vector<std::size_t> Scm::sample(Rng& rng) const {
  std::vector<std::size_t> values(nodes_.size());
  std::vector<double> perturbed;
  for (std::size_t i = 0; i < nodes_.size(); i++) {
    const ScmNode& n = nodes_[i];
    const double* row = n.logits.row(parent_row(n, values));
    perturbed.resize(n.cardinality);
    sample_gumbel(rng, perturbed.data(), n.cardinality);
    for (std::size_t c = 0; c < n.cardinality; c++) perturbed[c] += row[c];
    values[i] = kernels::argmax(perturbed.data(), n.cardinality);
  }
  return values;
}

std::string Scm::serialize() const {
  std::ostringstream os;
  os << "scm v1\nnodes " << nodes_.size() << '\n';
  char buf[40];
  for (const auto& n : nodes_) {
    os << "node " << n.name << ' ' << n.cardinality << ' ' << n.parents.size();
    for (auto p : n.parents) os << ' ' << p;
    os << '\n';
    for (std::size_t r = 0; r < n.logits.rows; r++) {
      os << "row";
      for (std::size_t c = 0; c < n.logits.cols; c++) {
        std::snprintf(buf, sizeof buf, "%.17g", n.logits.at(r, c));
        os << ' ' << buf;
      }
      os << '\n';
    }
  }
  return os.str();
}

Scm Scm::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string tok, ver;
  if (!(is >> tok >> ver) || tok != "scm" || ver != "v1")
    throw std::runtime_error("bad model header");
  std::size_t count = 0;
  if (!(is >> tok >> count) || tok != "nodes") throw std::runtime_error("bad node count line");
  Scm model;
  for (std::size_t i = 0; i < count; i++) {
    std::string name;
    std::size_t card = 0, nparents = 0;
    if (!(is >> tok >> name >> card >> nparents) || tok != "node")
      throw std::runtime_error("bad node line");
    std::vector<std::size_t> parents(nparents);
    for (auto& p : parents)
      if (!(is >> p)) throw std::runtime_error("bad parent list for node " + name);
    std::size_t rows = 1;
    for (auto p : parents) {
      if (p >= model.node_count()) throw std::runtime_error("parent index out of range: " + name);
      rows *= model.node(p).cardinality;
    }
    Mat logits(rows, card);
    for (std::size_t r = 0; r < rows; r++) {
      if (!(is >> tok) || tok != "row") throw std::runtime_error("bad row line for node " + name);
      for (std::size_t c = 0; c < card; c++)
        if (!(is >> logits.at(r, c))) throw std::runtime_error("bad logit value in node " + name);
    }
    model.add_node(name, card, std::move(parents), std::move(logits));
  }
  return model;
}

double JointTable::at(const std::vector<std::size_t>& idx) const {
  if (idx.size() != dims.size()) throw std::invalid_argument("joint index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims.size(); k++) {
    if (idx[k] >= dims[k]) throw std::out_of_range("joint index out of range");
    flat = flat * dims[k] + idx[k];
  }
  return p[flat];
}

namespace {

void validate_interventions(const Scm& model, const std::vector<Intervention>& ivs) {
  for (const auto& iv : ivs) {
    if (iv.node >= model.node_count())
      throw std::invalid_argument("intervention variable out of range");
    if (iv.value >= model.node(iv.node).cardinality)
      throw std::invalid_argument("intervention value out of range");
  }
}

}  // namespace

JointTable counterfactual_distribution(const Scm& model, const CounterfactualQuery& query,
                                       std::size_t samples, std::uint64_t seed) {
  if (query.worlds.empty()) throw std::invalid_argument("query needs at least one world");
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  for (const auto& w : query.worlds) {
    validate_interventions(model, w.interventions);
    if (w.target >= model.node_count()) throw std::invalid_argument("target variable out of range");
  }
  for (const auto& [var, val] : query.evidence) {
    if (var >= model.node_count()) throw std::invalid_argument("evidence variable out of range");
    if (val >= model.node(var).cardinality)
      throw std::invalid_argument("evidence value out of range");
  }

  JointTable joint;
  std::size_t total = 1;
  for (const auto& w : query.worlds) {
    joint.dims.push_back(model.node(w.target).cardinality);
    total *= joint.dims.back();
  }
  std::vector<std::uint64_t> counts(total, 0);
  std::uint64_t accepted = 0;

  for (std::size_t s = 0; s < samples; s++) {
    NoiseDraw noise = model.draw_noise(seed, s);
    std::vector<std::size_t> world0 = model.evaluate(query.worlds[0].interventions, noise);
    bool keep = true;
    for (const auto& [var, val] : query.evidence)
      if (world0[var] != val) {
        keep = false;
        break;
      }
    if (!keep) continue;
    std::size_t flat = world0[query.worlds[0].target];
    for (std::size_t k = 1; k < query.worlds.size(); k++) {
      std::vector<std::size_t> vk = model.evaluate(query.worlds[k].interventions, noise);
      flat = flat * joint.dims[k] + vk[query.worlds[k].target];
    }
    counts[flat]++;
    accepted++;
  }

  if (accepted == 0)
    throw InestimableEvidenceError("conditioning event never occurred in " +
                                   std::to_string(samples) + " samples");
  joint.p.resize(total);
  for (std::size_t i = 0; i < total; i++)
    joint.p[i] = static_cast<double>(counts[i]) / static_cast<double>(accepted);
  return joint;
}

double probability_of_necessity(const Scm& model, const PnWorld& factual,
                                const PnWorld& counterfactual, std::size_t samples,
                                std::uint64_t seed) {
  CounterfactualQuery q;
  q.worlds.push_back(WorldSpec{factual.interventions, factual.target});
  q.worlds.push_back(WorldSpec{counterfactual.interventions, counterfactual.target});
  q.evidence.emplace_back(factual.target, factual.value);
  JointTable joint = counterfactual_distribution(model, q, samples, seed);
  return joint.at({factual.value, counterfactual.value});
}

ConsistencyReport verify_gumbel_consistency(const std::vector<double>& factual_logits,
                                            const std::vector<double>& counterfactual_logits,
                                            std::size_t samples, std::uint64_t seed,
                                            NoiseCoupling coupling) {
  const std::size_t d = factual_logits.size();
  if (counterfactual_logits.size() != d)
    throw std::invalid_argument("logit vectors differ in length");
  if (d == 0) throw std::invalid_argument("empty logit vectors");
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  for (std::size_t i = 0; i < d; i++)
    if (!std::isfinite(factual_logits[i]) || !std::isfinite(counterfactual_logits[i]))
      throw std::invalid_argument("non-finite logits");
  const double* lp = factual_logits.data();
  const double* lq = counterfactual_logits.data();

  // Tally the shared-noise joint in blocks; the Gumbel transform runs on the
  // whole block at once.
  std::vector<std::uint64_t> count(d * d, 0);
  Rng rng(seed);
  const std::size_t per_sample = coupling == NoiseCoupling::shared ? d : 2 * d;
  const std::size_t block = 4096;
  std::vector<double> buf(block * per_sample);
  std::size_t done = 0;
  while (done < samples) {
    const std::size_t b = std::min(block, samples - done);
    const std::size_t n = b * per_sample;
    for (std::size_t i = 0; i < n; i++) buf[i] = rng.uniform();
    kernels::gumbel_from_uniform(buf.data(), buf.data(), n);
    for (std::size_t s = 0; s < b; s++) {
      const double* g1 = buf.data() + s * per_sample;
      const double* g2 = coupling == NoiseCoupling::shared ? g1 : g1 + d;
      std::size_t i1 = 0, i2 = 0;
      double v1 = lp[0] + g1[0];
      double v2 = lq[0] + g2[0];
      for (std::size_t j = 1; j < d; j++) {
        double c1 = lp[j] + g1[j];
        if (c1 > v1) {
          v1 = c1;
          i1 = j;
        }
        double c2 = lq[j] + g2[j];
        if (c2 > v2) {
          v2 = c2;
          i2 = j;
        }
      }
      count[i1 * d + i2]++;
    }
    done += b;
  }

  std::vector<std::uint64_t> row_sum(d, 0);
  for (std::size_t i = 0; i < d; i++)
    for (std::size_t j = 0; j < d; j++) row_sum[i] += count[i * d + j];

  // Normalizers cancel in the posterior ratio, so the antecedent
  // q_rk/p_rk <= q_r1/p_r1 reduces to diff[rk] <= diff[r1] on raw logits.
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; i++) diff[i] = lq[i] - lp[i];

  ConsistencyReport rep;
  rep.dim = d;
  rep.samples = samples;
  const double ns = static_cast<double>(samples);
  for (std::size_t r1 = 0; r1 < d; r1++) {
    for (std::size_t rk = 0; rk < d; rk++) {
      if (rk == r1) continue;
      const bool antecedent = diff[rk] <= diff[r1];
      const bool have_pn = row_sum[r1] > 0;
      const double pn = have_pn ? static_cast<double>(count[r1 * d + rk]) /
                                      static_cast<double>(row_sum[r1])
                                : 0.0;
      if (antecedent) {
        rep.antecedent_pairs++;
        if (!have_pn) {
          rep.skipped++;
        } else {
          const double tol = 3.0 * std::sqrt(pn * (1.0 - pn) / ns);
          if (pn > rep.pn_estimate) {
            rep.pn_estimate = pn;
            rep.tolerance = tol;
          }
          if (pn > tol) rep.violations++;
        }
      }
      if (have_pn && pn > 0.0) {
        rep.positive_pn_pairs++;
        if (diff[rk] > diff[r1]) rep.reverse_holds_pairs++;
      }
    }
  }
  rep.antecedent_holds = rep.antecedent_pairs > 0;
  rep.consistent = rep.violations == 0;
  return rep;
}

}  // namespace gumbelrec
