// SPDX-License-Identifier: Apache-2.0
//
// Feedback head over (state, action embedding): a two-layer ReLU network
// emitting normalized log-probabilities over the feedback classes
// {none, click, purchase}, sampled through Gumbel-max (hard) or
// Gumbel-Softmax (relaxed, temperature gamma_r).
//
// The same trunk doubles as the discriminator: D(s, a, R~) is a sigmoid over
// an affine readout of (log-likelihood of R~ under the head, grouped reward
// readout of R~). Real records use the observed one-hot; generated records
// carry a relaxed sample drawn with fresh noise on the same (s, a) and are
// treated as data (no gradient through the sampling path) on discriminator
// steps.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gumbelrec/mat.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

inline constexpr std::size_t kFeedbackNone = 0;
inline constexpr std::size_t kFeedbackClick = 1;
inline constexpr std::size_t kFeedbackPurchase = 2;

struct RewardHead {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t hidden = 512;
  std::size_t classes = 3;
  double gamma_r = 0.2;
  std::vector<std::size_t> positive_classes = {kFeedbackClick, kFeedbackPurchase};

  Mat w1;                  // hidden x (state_dim + action_dim)
  std::vector<double> b1;  // hidden
  Mat w2;                  // classes x hidden
  std::vector<double> b2;  // classes
  // discriminator readout coefficients {alpha on log-likelihood, alpha_m on
  // the grouped reward, bias}
  std::vector<double> readout = {1.0, 0.0, 0.0};

  static RewardHead init(std::size_t state_dim, std::size_t action_dim, std::size_t hidden,
                         std::size_t classes, Rng& rng);
  RewardHead zeros_like() const;

  template <class F> void visit(F&& f) { visit_impl(*this, f); }
  template <class F> void visit(F&& f) const { visit_impl(*this, f); }

 private:
  template <class Self, class F> static void visit_impl(Self& self, F& f) {
    f(std::string("reward.w1"), self.w1.data);
    f(std::string("reward.b1"), self.b1);
    f(std::string("reward.w2"), self.w2.data);
    f(std::string("reward.b2"), self.b2);
    f(std::string("reward.readout"), self.readout);
  }
};

struct RewardTrace {
  std::vector<double> input;  // [s; a]
  std::vector<double> pre;    // hidden pre-activation
  std::vector<double> hid;    // relu(pre)
  std::vector<double> logp;   // class log-probabilities
};

RewardTrace reward_forward(const RewardHead& head, const double* s, const double* a);

// Normalized log posterior over feedback classes (log-sum-exp is 0).
std::vector<double> reward_logits(const RewardHead& head, const std::vector<double>& s,
                                  const std::vector<double>& a);

// Backpropagates d_logp; accumulates into grad and, when non-null, into the
// state/action input gradients.
void reward_backward(const RewardHead& head, const RewardTrace& trace,
                     const std::vector<double>& d_logp, RewardHead& grad, double* d_s,
                     double* d_a);

// softmax((logits + noise) / gamma_r); throws if gamma_r <= 0.
std::vector<double> gumbel_softmax_sample(const std::vector<double>& logits,
                                          const std::vector<double>& noise, double gamma_r);

// r = 2 * R~[positive] - 0.5, in [-0.5, 1.5].
double clipped_reward(const std::vector<double>& r_tilde, std::size_t positive_index);

// Same readout over a class group: 2 * sum_{c in group} R~[c] - 0.5.
double group_reward(const std::vector<double>& r_tilde,
                    const std::vector<std::size_t>& positive_classes);

// Discriminator value for one (already computed) head output and one simplex
// feedback vector.
struct DiscTrace {
  double phi = 0.0;  // sum_c R~_c * logp_c
  double m = 0.0;    // grouped reward readout of R~
  double t = 0.0;    // affine readout
  double d = 0.5;    // sigmoid(t)
};

DiscTrace discriminate(const RewardHead& head, const std::vector<double>& logp,
                       const std::vector<double>& r_tilde);

struct DiscRecord {
  std::vector<double> state;
  std::vector<double> action_emb;
  std::size_t observed = 0;        // feedback class of the real branch
  std::vector<double> generated;   // relaxed sample for the fake branch
};

// Fills each record's `generated` with a Gumbel-Softmax sample from the
// current head at (state, action): the Eq.-9 fake branch resamples feedback
// only. One noise vector per record, drawn in order from rng.
void sample_generated(std::vector<DiscRecord>& batch, const RewardHead& head, Rng& rng);

struct AdversarialResult {
  // disc_loss = -(mean log D(real) + mean log(1 - D(generated)));
  // at D = 0.5 everywhere this is -2*ln(0.5) = 1.3863 per pair.
  double disc_loss = 0.0;
  // the generator-facing side of the min-max: mean log(1 - D(generated))
  double gen_loss = 0.0;
  double mean_d_real = 0.0;
  double mean_d_generated = 0.0;
  RewardHead grad;                            // gradient of disc_loss
  std::vector<std::vector<double>> d_state;   // per record, gradient of disc_loss
  std::vector<std::vector<double>> d_action;  // per record
};

// Pure function of (batch, head); every record contributes one real and one
// generated pair on the same (s, a).
AdversarialResult adversarial_losses(const std::vector<DiscRecord>& batch,
                                     const RewardHead& head);

}  // namespace gumbelrec
