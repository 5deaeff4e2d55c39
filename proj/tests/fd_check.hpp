// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference gradient checking shared by the module tests.
// Walks every tensor exposed by the parameter struct's visit(), perturbs one
// coordinate at a time, and compares against the analytic gradient collected
// in a same-shaped struct.

#pragma once

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

namespace testutil {

inline bool grad_close(double analytic, double numeric, double rel, double floor_abs) {
  double scale = std::max(std::abs(analytic), std::abs(numeric));
  return std::abs(analytic - numeric) <= std::max(floor_abs, rel * scale);
}

// Params: any struct with visit(f) where f(name, std::vector<double>&).
// Objective: nullary callable re-evaluating the scalar loss from `params`.
template <class Params, class Objective>
void fd_check(Params& params, Params& analytic_grad, Objective&& objective, double step = 1e-5,
              double rel = 1e-4, double floor_abs = 1e-8) {
  std::vector<std::vector<double>*> grads;
  analytic_grad.visit(
      [&](const std::string&, std::vector<double>& v) { grads.push_back(&v); });
  std::size_t ti = 0;
  params.visit([&](const std::string& name, std::vector<double>& v) {
    std::vector<double>& g = *grads[ti++];
    REQUIRE(g.size() == v.size());
    for (std::size_t i = 0; i < v.size(); i++) {
      double save = v[i];
      v[i] = save + step;
      double fp = objective();
      v[i] = save - step;
      double fm = objective();
      v[i] = save;
      double numeric = (fp - fm) / (2.0 * step);
      if (!grad_close(g[i], numeric, rel, floor_abs)) {
        CAPTURE(name);
        CAPTURE(i);
        CAPTURE(g[i]);
        CAPTURE(numeric);
        FAIL_CHECK("gradient mismatch");
      }
    }
  });
}

}  // namespace testutil
