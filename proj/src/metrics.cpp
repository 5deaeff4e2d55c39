// SPDX-License-Identifier: Apache-2.0

#include "gumbelrec/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gumbelrec {

namespace {

void check_records(const std::vector<RankingRecord>& records, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (records.empty()) throw std::invalid_argument("no ranking records");
  for (const auto& r : records)
    if (r.ranked.size() < k) throw std::invalid_argument("ranked list shorter than k");
}

// position of truth within the top k, 1-based; 0 when absent
std::size_t rank_within_k(const RankingRecord& r, std::size_t k) {
  for (std::size_t i = 0; i < k; i++)
    if (r.ranked[i] == r.truth) return i + 1;
  return 0;
}

// continued-fraction helper for the regularized incomplete beta function
double betacf(double a, double b, double x) {
  const int max_iter = 300;
  const double eps = 3e-14, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; m++) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log1p(-x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double hit_ratio_at_k(const std::vector<RankingRecord>& records, std::size_t k) {
  check_records(records, k);
  double hits = 0.0;
  for (const auto& r : records)
    if (rank_within_k(r, k) > 0) hits += 1.0;
  return hits / static_cast<double>(records.size());
}

double ndcg_at_k(const std::vector<RankingRecord>& records, std::size_t k) {
  check_records(records, k);
  double total = 0.0;
  for (const auto& r : records) {
    std::size_t rank = rank_within_k(r, k);
    if (rank > 0) total += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
  }
  return total / static_cast<double>(records.size());
}

double ctr(double r_epi, std::size_t n_epi) {
  if (n_epi == 0) throw std::invalid_argument("episode length must be at least 1");
  double cap = 10.0 * static_cast<double>(n_epi);
  if (!(r_epi >= 0.0 && r_epi <= cap))
    throw std::out_of_range("episode reward outside [0, 10 * n_epi]");
  return r_epi / cap;
}

std::map<int, std::vector<RankingRecord>> partition_by_feedback(
    const std::vector<RankingRecord>& records) {
  std::map<int, std::vector<RankingRecord>> parts;
  for (const auto& r : records) parts[r.feedback].push_back(r);
  return parts;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  double x = df / (df + t * t);
  return reg_inc_beta(df / 2.0, 0.5, x);
}

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("each sample needs at least 2 observations");
  auto mean_var = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);
    return std::pair<double, double>{m, s2};
  };
  auto [m1, v1] = mean_var(a);
  auto [m2, v2] = mean_var(b);
  double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  double se2 = v1 / n1 + v2 / n2;
  TTestResult out;
  if (se2 == 0.0) {
    // two constant samples: identical means are indistinguishable
    out.t = m1 == m2 ? 0.0 : std::numeric_limits<double>::infinity();
    out.df = n1 + n2 - 2.0;
    out.p = m1 == m2 ? 1.0 : 0.0;
    return out;
  }
  out.t = (m1 - m2) / std::sqrt(se2);
  double d1 = (v1 / n1) * (v1 / n1) / (n1 - 1.0);
  double d2 = (v2 / n2) * (v2 / n2) / (n2 - 1.0);
  out.df = se2 * se2 / (d1 + d2);
  out.p = student_t_two_sided_p(out.t, out.df);
  return out;
}

}  // namespace gumbelrec
