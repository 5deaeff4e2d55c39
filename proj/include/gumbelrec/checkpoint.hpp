// SPDX-License-Identifier: Apache-2.0
//
// Versioned binary snapshot: the full run configuration, the training
// position (iteration and simulator episode counters, which key every
// derived RNG stream), and every named parameter tensor as raw doubles.
// All integers and doubles are little-endian; round trips are bit-exact.

#pragma once

#include <cstdint>
#include <string>

#include "gumbelrec/config.hpp"
#include "gumbelrec/model.hpp"

namespace gumbelrec {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  std::size_t catalog = 0;
  std::uint64_t iteration = 0;  // completed outer iterations
  std::uint64_t episodes = 0;   // simulator episodes consumed
  Model model;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);

// Throws std::runtime_error on an unreadable file, a bad magic, an
// unsupported version, or tensors that do not match the config's shapes.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace gumbelrec
