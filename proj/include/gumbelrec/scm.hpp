// SPDX-License-Identifier: Apache-2.0
//
// Discrete structural causal model with categorical Gumbel-max mechanisms.
//
// Each node carries a logit table: one row per combination of parent values
// (mixed radix, first parent is the most significant digit, last parent varies
// fastest), one column per category. A node's value is
// argmax_c(logits[parent_row][c] + g_c) with g standard Gumbel noise, one
// independent draw per category. Counterfactual queries evaluate several
// mutilated copies of the model on the SAME noise draw and tally outcomes.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gumbelrec/mat.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Conditioning event never realized in the Monte-Carlo sample.
struct InestimableEvidenceError : std::runtime_error {
  explicit InestimableEvidenceError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic selection: argmax over logits + noise, ties to the lowest index.
std::size_t gumbel_max_select(const std::vector<double>& logits, const std::vector<double>& noise);

struct ScmNode {
  std::string name;
  std::size_t cardinality = 0;
  std::vector<std::size_t> parents;  // indices of previously added nodes
  Mat logits;                        // parent-combination rows x cardinality
};

// Hard intervention: clamp `node` to `value`, severing its mechanism.
struct Intervention {
  std::size_t node = 0;
  std::size_t value = 0;
};

// One counterfactual world of a query: interventions plus the variable read out.
struct WorldSpec {
  std::vector<Intervention> interventions;
  std::size_t target = 0;
};

struct CounterfactualQuery {
  std::vector<WorldSpec> worlds;  // K >= 1, all evaluated on shared noise
  // Rejection evidence on world 0 as (variable, value) pairs.
  std::vector<std::pair<std::size_t, std::size_t>> evidence;
};

// Gumbel noise for every node of one exogenous draw.
struct NoiseDraw {
  std::vector<std::vector<double>> g;  // g[node][category]
};

class Scm {
 public:
  // Parents must already exist (enforces acyclicity by construction).
  // logits must have one row per parent-value combination.
  std::size_t add_node(std::string name, std::size_t cardinality, std::vector<std::size_t> parents,
                       Mat logits);

  std::size_t node_count() const { return nodes_.size(); }
  const ScmNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t index_of(const std::string& name) const;

  // Exogenous draw keyed by (seed, sample index, node): factual and
  // counterfactual worlds of the same sample consume identical noise, and
  // samples can be generated in any order.
  NoiseDraw draw_noise(std::uint64_t seed, std::uint64_t sample_index) const;

  // Pure function of (interventions, noise); bit-identical on repeat calls.
  std::vector<std::size_t> evaluate(const std::vector<Intervention>& interventions,
                                    const NoiseDraw& noise) const;

  // Observational ancestral sample.
  std::vector<std::size_t> sample(Rng& rng) const;

  std::string serialize() const;
  static Scm deserialize(const std::string& text);

 private:
  std::size_t parent_row(const ScmNode& n, const std::vector<std::size_t>& values) const;

  std::vector<ScmNode> nodes_;
};

// Normalized joint distribution over the K world targets of a query.
// Flattened mixed radix: world 0 is the most significant digit.
struct JointTable {
  std::vector<std::size_t> dims;
  std::vector<double> p;

  double at(const std::vector<std::size_t>& idx) const;
};

JointTable counterfactual_distribution(const Scm& model, const CounterfactualQuery& query,
                                       std::size_t samples, std::uint64_t seed);

// One world of a probability-of-necessity query: interventions, the variable
// read out, and its observed (factual) or queried (counterfactual) value.
struct PnWorld {
  std::vector<Intervention> interventions;
  std::size_t target = 0;
  std::size_t value = 0;
};

// P(counterfactual.target = counterfactual.value | factual.target = factual.value)
// under shared noise. Throws InestimableEvidenceError if the factual event
// never occurs in the sample.
double probability_of_necessity(const Scm& model, const PnWorld& factual,
                                const PnWorld& counterfactual, std::size_t samples,
                                std::uint64_t seed);

enum class NoiseCoupling {
  shared,       // both worlds reuse one Gumbel draw per sample
  independent,  // contrast mode: fresh draw per world, breaks the theorem
};

// Consistency check for a pair of outcome distributions over the same support.
// For every ordered outcome pair (r1, rk) whose posterior ratios satisfy
// q_rk/p_rk <= q_r1/p_r1, the theorem says PN(R_k = rk | R_1 = r1) = 0 under
// shared noise. The report covers all outcome pairs of one logit pair.
struct ConsistencyReport {
  bool antecedent_holds = false;  // some outcome pair satisfies the ratio inequality
  double pn_estimate = 0.0;       // largest PN over antecedent-satisfying pairs
  bool consistent = true;         // no PN estimate above the Monte-Carlo tolerance
  double tolerance = 0.0;         // 3*sqrt(p*(1-p)/samples) at pn_estimate

  std::size_t dim = 0;
  std::size_t samples = 0;
  std::size_t antecedent_pairs = 0;  // outcome pairs where the inequality holds
  std::size_t violations = 0;        // antecedent pairs with PN above tolerance
  std::size_t skipped = 0;           // antecedent pairs whose conditioning set was empty

  // The implication read from the other side: every outcome pair with a
  // positive PN estimate should satisfy the strict reverse inequality.
  std::size_t positive_pn_pairs = 0;
  std::size_t reverse_holds_pairs = 0;
};

ConsistencyReport verify_gumbel_consistency(const std::vector<double>& factual_logits,
                                            const std::vector<double>& counterfactual_logits,
                                            std::size_t samples, std::uint64_t seed,
                                            NoiseCoupling coupling = NoiseCoupling::shared);

}  // namespace gumbelrec
