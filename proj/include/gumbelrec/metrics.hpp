// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace gumbelrec {

// One ranked recommendation list scored against the logged next item.
// `ranked` holds unique item ids, best first (producer's contract).
struct RankingRecord {
  std::vector<std::size_t> ranked;
  std::size_t truth = 0;
  int feedback = 0;
};

// Fraction of records whose truth appears in the top k.
double hit_ratio_at_k(const std::vector<RankingRecord>& records, std::size_t k);

// Binary-relevance NDCG: per record 1/log2(rank + 1) if the truth sits at
// rank <= k (1-based), else 0; the ideal gain is 1, so the mean is already
// normalized.
double ndcg_at_k(const std::vector<RankingRecord>& records, std::size_t k);

// r_epi / (10 * n_epi) for integer per-step rewards in [0, 10].
double ctr(double r_epi, std::size_t n_epi);

std::map<int, std::vector<RankingRecord>> partition_by_feedback(
    const std::vector<RankingRecord>& records);

// Two-sided p-value of a Student-t statistic.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Welch's unequal-variance two-sided t-test over two metric samples.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gumbelrec
