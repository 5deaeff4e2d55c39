// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gumbelrec {

// Adam over any parameter struct exposing visit(f(name, vector<double>&)).
// Moment buffers are keyed by tensor name, so one optimizer instance can own
// several parameter structs as long as their tensor names stay distinct.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // params -= lr * mhat / (sqrt(vhat) + eps), standard bias correction.
  template <class Params>
  void step(Params& params, const Params& grad) {
    t_ += 1;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    std::vector<const std::vector<double>*> gs;
    grad.visit([&](const std::string&, const std::vector<double>& g) { gs.push_back(&g); });
    std::size_t ti = 0;
    params.visit([&](const std::string& name, std::vector<double>& p) {
      const std::vector<double>& g = *gs[ti++];
      if (g.size() != p.size()) throw std::invalid_argument("gradient shape mismatch: " + name);
      Moments& m = moments_[name];
      if (m.m.empty()) {
        m.m.assign(p.size(), 0.0);
        m.v.assign(p.size(), 0.0);
      }
      for (std::size_t i = 0; i < p.size(); i++) {
        m.m[i] = beta1_ * m.m[i] + (1.0 - beta1_) * g[i];
        m.v[i] = beta2_ * m.v[i] + (1.0 - beta2_) * g[i] * g[i];
        p[i] -= lr_ * (m.m[i] / bc1) / (std::sqrt(m.v[i] / bc2) + eps_);
      }
    });
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::unordered_map<std::string, Moments> moments_;
};

}  // namespace gumbelrec
