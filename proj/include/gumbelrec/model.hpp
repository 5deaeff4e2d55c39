// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "gumbelrec/config.hpp"
#include "gumbelrec/critic.hpp"
#include "gumbelrec/encoder.hpp"
#include "gumbelrec/policy.hpp"
#include "gumbelrec/reward.hpp"
#include "gumbelrec/rng.hpp"

namespace gumbelrec {

// Full parameter bundle: sequence encoder, feedback head/discriminator,
// action scorer, and the critic. The critic consumes (state, action
// embedding) for the td kind and the state alone otherwise.
struct Model {
  EncoderParams encoder;
  RewardHead reward;
  PolicyParams policy;
  CriticParams critic;

  template <class F> void visit(F&& f) {
    encoder.visit(f);
    reward.visit(f);
    policy.visit(f);
    critic.visit(f);
  }
  template <class F> void visit(F&& f) const {
    encoder.visit(f);
    reward.visit(f);
    policy.visit(f);
    critic.visit(f);
  }
};

// Draws every component from one stream in a fixed order, so identical
// (config, catalog, rng state) give identical models.
Model init_model(const RunConfig& cfg, std::size_t catalog, Rng& rng);

}  // namespace gumbelrec
