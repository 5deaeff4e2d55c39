// SPDX-License-Identifier: Apache-2.0
#include "gumbelrec/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace gumbelrec {
namespace {

constexpr char kMagic[8] = {'G', 'R', 'E', 'C', 'S', 'N', 'A', 'P'};

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; i++) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; i++) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

double get_f64(std::istream& in) {
  std::uint64_t bits = get_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  std::uint64_t n = get_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, 8);
  put_u64(out, kCheckpointVersion);
  put_string(out, serialize_config(ck.config));
  put_u64(out, ck.catalog);
  put_u64(out, ck.iteration);
  put_u64(out, ck.episodes);

  std::uint64_t count = 0;
  ck.model.visit([&](const std::string&, const std::vector<double>&) { count++; });
  put_u64(out, count);
  ck.model.visit([&](const std::string& name, const std::vector<double>& t) {
    put_string(out, name);
    put_u64(out, t.size());
    for (double v : t) put_f64(out, v);
  });
  if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  std::uint64_t version = get_u64(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                             " (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ck;
  ck.config = parse_config(get_string(in));
  ck.catalog = static_cast<std::size_t>(get_u64(in));
  ck.iteration = get_u64(in);
  ck.episodes = get_u64(in);

  Rng shape_rng(0);
  ck.model = init_model(ck.config, ck.catalog, shape_rng);

  std::map<std::string, std::vector<double>*> slots;
  ck.model.visit([&](const std::string& name, std::vector<double>& t) { slots[name] = &t; });

  std::uint64_t count = get_u64(in);
  std::map<std::string, bool> seen;
  for (std::uint64_t i = 0; i < count; i++) {
    std::string name = get_string(in);
    std::uint64_t n = get_u64(in);
    auto it = slots.find(name);
    if (it == slots.end()) throw std::runtime_error("unexpected tensor: " + name);
    if (it->second->size() != n) {
      throw std::runtime_error("tensor shape mismatch: " + name);
    }
    for (std::uint64_t j = 0; j < n; j++) (*it->second)[j] = get_f64(in);
    seen[name] = true;
  }
  if (seen.size() != slots.size()) throw std::runtime_error("checkpoint is missing tensors");
  return ck;
}

}  // namespace gumbelrec
