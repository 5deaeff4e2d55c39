// SPDX-License-Identifier: Apache-2.0
//
// Runtime backend selection. Default order: AVX2 (if the CPU reports avx2+fma),
// NEON (aarch64 builds), scalar. GUMBELREC_KERNELS=scalar|avx2|neon overrides,
// and force_backend() does the same from code.

#include "gumbelrec/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gumbelrec::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(GUMBELREC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct State {
  Ops ops;
  Backend backend;

  State() {
    backend = Backend::scalar;
    ops = detail::scalar_ops();
#ifdef GUMBELREC_HAVE_NEON
    backend = Backend::neon;
    ops = detail::neon_ops();
#endif
#ifdef GUMBELREC_HAVE_AVX2
    if (cpu_has_avx2()) {
      backend = Backend::avx2;
      ops = detail::avx2_ops();
    }
#endif
    if (const char* env = std::getenv("GUMBELREC_KERNELS")) {
      set(parse(env));
    }
  }

  static Backend parse(const std::string& name) {
    if (name == "scalar") return Backend::scalar;
    if (name == "avx2") return Backend::avx2;
    if (name == "neon") return Backend::neon;
    throw std::runtime_error("unknown kernel backend: " + name);
  }

  void set(Backend b) {
    if (!backend_available(b))
      throw std::runtime_error("kernel backend unavailable: " + std::string(backend_name(b)));
    backend = b;
    switch (b) {
      case Backend::scalar:
        ops = detail::scalar_ops();
        break;
#ifdef GUMBELREC_HAVE_AVX2
      case Backend::avx2:
        ops = detail::avx2_ops();
        break;
#endif
#ifdef GUMBELREC_HAVE_NEON
      case Backend::neon:
        ops = detail::neon_ops();
        break;
#endif
      default:
        break;
    }
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

const Ops& ops() { return state().ops; }

Backend active_backend() { return state().backend; }

std::string_view backend_name() { return backend_name(state().backend); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "?";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
      return cpu_has_avx2();
    case Backend::neon:
#ifdef GUMBELREC_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

void force_backend(Backend b) { state().set(b); }

}  // namespace gumbelrec::kernels
