// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fd_check.hpp"
#include "gumbelrec/gumbel.hpp"
#include "gumbelrec/numeric.hpp"
#include "gumbelrec/optim.hpp"
#include "gumbelrec/reward.hpp"
#include "gumbelrec/scm.hpp"

using namespace gumbelrec;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<DiscRecord> random_batch(Rng& rng, const RewardHead& head, std::size_t n) {
  std::vector<DiscRecord> batch(n);
  for (auto& rec : batch) {
    rec.state = random_vec(rng, head.state_dim);
    rec.action_emb = random_vec(rng, head.action_dim);
    rec.observed = rng.below(head.classes);
  }
  sample_generated(batch, head, rng);
  return batch;
}

struct Quad {
  std::vector<double> x{5.0, -3.0, 2.0};
  template <class F> void visit(F&& f) { f(std::string("x"), x); }
  template <class F> void visit(F&& f) const { f(std::string("x"), x); }
};

}  // namespace

TEST_CASE("zero weights give the uniform log posterior") {
  Rng rng(1);
  RewardHead h = RewardHead::init(4, 4, 8, 3, rng);
  h.visit([](const std::string&, std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); });
  auto logp = reward_logits(h, std::vector<double>(4, 0.3), std::vector<double>(4, -0.7));
  for (double v : logp) CHECK(v == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("log posterior is normalized for any input") {
  Rng rng(2);
  RewardHead h = RewardHead::init(5, 3, 16, 3, rng);
  for (int i = 0; i < 10; i++) {
    auto logp = reward_logits(h, random_vec(rng, 5), random_vec(rng, 3));
    double z = 0.0;
    for (double v : logp) z += std::exp(v);
    CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("head gradients match central finite differences") {
  Rng rng(3);
  for (int inst = 0; inst < 3; inst++) {
    RewardHead h = RewardHead::init(5, 4, 8, 3, rng);
    auto s = random_vec(rng, 5);
    auto a = random_vec(rng, 4);
    auto probe = random_vec(rng, 3);

    RewardHead grad = h.zeros_like();
    RewardTrace t = reward_forward(h, s.data(), a.data());
    reward_backward(h, t, probe, grad, nullptr, nullptr);
    auto objective = [&]() {
      auto logp = reward_logits(h, s, a);
      return kernels::dot(logp.data(), probe.data(), logp.size());
    };
    CAPTURE(inst);
    testutil::fd_check(h, grad, objective);
  }
}

TEST_CASE("state and action gradients match finite differences") {
  Rng rng(4);
  RewardHead h = RewardHead::init(4, 4, 8, 3, rng);
  auto s = random_vec(rng, 4);
  auto a = random_vec(rng, 4);
  auto probe = random_vec(rng, 3);
  RewardHead sink = h.zeros_like();
  RewardTrace t = reward_forward(h, s.data(), a.data());
  std::vector<double> d_s(4, 0.0), d_a(4, 0.0);
  reward_backward(h, t, probe, sink, d_s.data(), d_a.data());

  const double step = 1e-5;
  for (std::size_t i = 0; i < 4; i++) {
    double save = s[i];
    s[i] = save + step;
    double fp = kernels::dot(reward_logits(h, s, a).data(), probe.data(), 3);
    s[i] = save - step;
    double fm = kernels::dot(reward_logits(h, s, a).data(), probe.data(), 3);
    s[i] = save;
    CHECK(testutil::grad_close(d_s[i], (fp - fm) / (2 * step), 1e-4, 1e-8));
  }
  for (std::size_t i = 0; i < 4; i++) {
    double save = a[i];
    a[i] = save + step;
    double fp = kernels::dot(reward_logits(h, s, a).data(), probe.data(), 3);
    a[i] = save - step;
    double fm = kernels::dot(reward_logits(h, s, a).data(), probe.data(), 3);
    a[i] = save;
    CHECK(testutil::grad_close(d_a[i], (fp - fm) / (2 * step), 1e-4, 1e-8));
  }
}

TEST_CASE("gumbel-softmax samples live on the simplex") {
  Rng rng(5);
  std::vector<double> logits{0.3, -1.2, 0.9};
  for (int i = 0; i < 50; i++) {
    auto noise = sample_gumbel(rng, 3);
    auto r = gumbel_softmax_sample(logits, noise, 0.2);
    double sum = 0.0;
    for (double v : r) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gumbel_softmax_sample(logits, {0.0, 0.0, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gumbel_softmax_sample(logits, {0.0}, 0.2), std::invalid_argument);
}

TEST_CASE("large temperature flattens the sample toward uniform") {
  Rng rng(6);
  std::vector<double> logits{1.0, -1.0, 0.5};
  auto noise = sample_gumbel(rng, 3);
  auto r = gumbel_softmax_sample(logits, noise, 100.0);
  for (double v : r) CHECK(std::abs(v - 1.0 / 3.0) < 0.01);
}

TEST_CASE("small temperature approaches the hard gumbel-max one-hot") {
  // at temperature tau the soft sample is within tol of the one-hot whenever
  // the top-two gap of logits+noise exceeds tau*ln(1/tol), so the miss rate
  // scales with (1 - sum p^2); peaked score vectors keep it under 1%
  Rng rng(7);
  const std::vector<std::vector<double>> vectors{
      {std::log(0.95), std::log(0.02), std::log(0.03)},
      {4.0, -1.0, 0.0},
      {5.0, 0.0, 1.0, -1.0},
      {6.0, 2.0, 1.0, 0.0, -1.0},
  };
  int close_count = 0, draws = 0;
  for (const auto& logits : vectors) {
    for (int i = 0; i < 2500; i++) {
      auto noise = sample_gumbel(rng, logits.size());
      auto soft = gumbel_softmax_sample(logits, noise, 0.01);
      std::size_t hard = gumbel_max_select(logits, noise);
      double linf = 0.0;
      for (std::size_t c = 0; c < logits.size(); c++)
        linf = std::max(linf, std::abs(soft[c] - (c == hard ? 1.0 : 0.0)));
      if (linf <= 0.01) close_count++;
      draws++;
    }
  }
  CHECK(close_count >= static_cast<int>(0.99 * draws));
}

TEST_CASE("pointwise limit for fixed noise") {
  std::vector<double> logits{0.7, -0.2, 0.1};
  std::vector<double> noise{0.3, 1.4, -0.5};
  std::size_t hard = gumbel_max_select(logits, noise);
  auto soft = gumbel_softmax_sample(logits, noise, 1e-3);
  for (std::size_t c = 0; c < 3; c++)
    CHECK(std::abs(soft[c] - (c == hard ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("soft argmax agrees with the hard index when dominant") {
  Rng rng(8);
  std::vector<double> logits{0.2, -0.4, 1.1};
  for (int i = 0; i < 200; i++) {
    auto noise = sample_gumbel(rng, 3);
    auto soft = gumbel_softmax_sample(logits, noise, 0.2);
    std::size_t hard = gumbel_max_select(logits, noise);
    std::size_t soft_arg = kernels::argmax(soft.data(), 3);
    if (soft[soft_arg] > 0.5) CHECK(soft_arg == hard);
  }
}

TEST_CASE("clipped reward arithmetic") {
  CHECK(clipped_reward({0.0, 1.0}, 1) == 1.5);
  CHECK(clipped_reward({0.75, 0.25}, 1) == 0.0);
  CHECK(clipped_reward({1.0, 0.0}, 1) == -0.5);
  CHECK_THROWS_AS(clipped_reward({1.0, 0.0}, 5), std::out_of_range);
  Rng rng(9);
  for (int i = 0; i < 100; i++) {
    auto r = gumbel_softmax_sample({0.1, 0.2, 0.3}, sample_gumbel(rng, 3), 0.2);
    double v = clipped_reward(r, rng.below(3));
    CHECK(v >= -0.5);
    CHECK(v <= 1.5);
  }
}

TEST_CASE("group reward sums the positive-class mass") {
  CHECK(group_reward({0.0, 0.4, 0.6}, {1, 2}) == doctest::Approx(1.5));
  CHECK(group_reward({1.0, 0.0, 0.0}, {1, 2}) == doctest::Approx(-0.5));
  CHECK(group_reward({0.5, 0.25, 0.25}, {1, 2}) == doctest::Approx(0.5));
}

TEST_CASE("zero readout gives D = 0.5 and the 2 ln 0.5 objective") {
  Rng rng(10);
  RewardHead h = RewardHead::init(4, 4, 8, 3, rng);
  h.readout = {0.0, 0.0, 0.0};
  auto batch = random_batch(rng, h, 6);
  for (const auto& rec : batch) {
    auto logp = reward_logits(h, rec.state, rec.action_emb);
    CHECK(discriminate(h, logp, rec.generated).d == 0.5);
  }
  AdversarialResult res = adversarial_losses(batch, h);
  CHECK(res.disc_loss == doctest::Approx(-2.0 * std::log(0.5)).epsilon(1e-12));
  CHECK(res.mean_d_real == doctest::Approx(0.5));
  // D is flat, so only the readout coefficients can have gradient
  CHECK(res.grad.w1.data == std::vector<double>(res.grad.w1.data.size(), 0.0));
}

TEST_CASE("perfect separation drives the objective toward its supremum") {
  Rng rng(11);
  RewardHead h = RewardHead::init(2, 2, 4, 2, rng);
  h.positive_classes = {1};
  // logits strongly favor class 0; cook generated mass onto class 1
  h.visit([](const std::string&, std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); });
  h.b2 = {9.0, 0.0};
  h.readout = {10.0, 0.0, 5.0};
  std::vector<DiscRecord> batch(3);
  for (auto& rec : batch) {
    rec.state = {0.0, 0.0};
    rec.action_emb = {0.0, 0.0};
    rec.observed = 0;
    rec.generated = {0.0, 1.0};
  }
  AdversarialResult res = adversarial_losses(batch, h);
  CHECK(res.disc_loss < 0.05);  // objective = -loss, approaching 0 from below
  CHECK(res.mean_d_real > 0.99);
  CHECK(res.mean_d_generated < 0.01);
}

TEST_CASE("adversarial gradients match finite differences") {
  Rng rng(12);
  RewardHead h = RewardHead::init(5, 4, 8, 3, rng);
  h.readout = {0.8, -0.3, 0.1};
  auto batch = random_batch(rng, h, 3);
  AdversarialResult res = adversarial_losses(batch, h);
  auto objective = [&]() { return adversarial_losses(batch, h).disc_loss; };
  testutil::fd_check(h, res.grad, objective);

  const double step = 1e-5;
  for (std::size_t r = 0; r < batch.size(); r++)
    for (std::size_t i = 0; i < h.state_dim; i++) {
      double save = batch[r].state[i];
      batch[r].state[i] = save + step;
      double fp = objective();
      batch[r].state[i] = save - step;
      double fm = objective();
      batch[r].state[i] = save;
      CHECK(testutil::grad_close(res.d_state[r][i], (fp - fm) / (2 * step), 1e-4, 1e-8));
    }
  for (std::size_t r = 0; r < batch.size(); r++)
    for (std::size_t i = 0; i < h.action_dim; i++) {
      double save = batch[r].action_emb[i];
      batch[r].action_emb[i] = save + step;
      double fp = objective();
      batch[r].action_emb[i] = save - step;
      double fm = objective();
      batch[r].action_emb[i] = save;
      CHECK(testutil::grad_close(res.d_action[r][i], (fp - fm) / (2 * step), 1e-4, 1e-8));
    }
}

TEST_CASE("empty or malformed batches are rejected") {
  Rng rng(13);
  RewardHead h = RewardHead::init(4, 4, 8, 3, rng);
  CHECK_THROWS_AS(adversarial_losses({}, h), std::invalid_argument);
  auto batch = random_batch(rng, h, 2);
  batch[1].observed = 7;
  CHECK_THROWS_AS(adversarial_losses(batch, h), std::out_of_range);
}

TEST_CASE("adam drives a quadratic to its minimum") {
  Quad q, g;
  Adam opt(0.1);
  for (int i = 0; i < 500; i++) {
    for (std::size_t j = 0; j < 3; j++) g.x[j] = 2.0 * q.x[j];
    opt.step(q, g);
  }
  for (double v : q.x) CHECK(std::abs(v) < 1e-3);
}

TEST_CASE("discriminator training on self-generated data settles near chance") {
  Rng rng(14);
  const std::size_t sd = 4, ad = 4, n_pairs = 32;
  RewardHead truth = RewardHead::init(sd, ad, 16, 3, rng);
  RewardHead h = RewardHead::init(sd, ad, 16, 3, rng);

  std::vector<DiscRecord> pool(n_pairs);
  for (auto& rec : pool) {
    rec.state = random_vec(rng, sd);
    rec.action_emb = random_vec(rng, ad);
    auto logp = reward_logits(truth, rec.state, rec.action_emb);
    rec.observed = gumbel_max_select(logp, sample_gumbel(rng, 3));
  }

  Adam opt(5e-3);
  for (int it = 0; it < 1200; it++) {
    auto batch = pool;
    // refresh observed feedback from the true process and resample fakes
    for (auto& rec : batch) {
      auto logp = reward_logits(truth, rec.state, rec.action_emb);
      rec.observed = gumbel_max_select(logp, sample_gumbel(rng, 3));
    }
    sample_generated(batch, h, rng);
    AdversarialResult res = adversarial_losses(batch, h);
    opt.step(h, res.grad);
  }

  // measure accuracy on fresh draws
  std::size_t correct = 0, total = 0;
  for (int rep = 0; rep < 20; rep++) {
    auto batch = pool;
    for (auto& rec : batch) {
      auto logp = reward_logits(truth, rec.state, rec.action_emb);
      rec.observed = gumbel_max_select(logp, sample_gumbel(rng, 3));
    }
    sample_generated(batch, h, rng);
    for (const auto& rec : batch) {
      auto logp = reward_logits(h, rec.state, rec.action_emb);
      std::vector<double> one_hot(3, 0.0);
      one_hot[rec.observed] = 1.0;
      if (discriminate(h, logp, one_hot).d > 0.5) correct++;
      if (discriminate(h, logp, rec.generated).d < 0.5) correct++;
      total += 2;
    }
  }
  double acc = static_cast<double>(correct) / static_cast<double>(total);
  CHECK(acc > 0.4);
  CHECK(acc < 0.6);
}
