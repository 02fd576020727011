// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/power_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "scmap/error.hpp"
#include "scmap/logic_graph.hpp"

namespace scmap {

void PowerModel::validate() const {
  for (double v : {w_cap, w_ds, static_w, noise_sigma}) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::kValidation, "power model weights and sigma must be finite and >= 0");
  }
  if (cycles < 0) throw Error(ErrorKind::kValidation, "power model cycles must be >= 0");
}

std::vector<std::uint8_t> key_bytes(std::uint64_t key, int width) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>((width + 7) / 8));
  for (std::size_t i = 0; i < out.size() && i < 8; ++i) out[i] = static_cast<std::uint8_t>(key >> (8 * i));
  return out;
}

std::uint64_t key_word(std::span<const std::uint8_t> key) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < key.size() && i < 8; ++i) k |= static_cast<std::uint64_t>(key[i]) << (8 * i);
  return k;
}

TraceSet simulate_traces(const Design& mapped, const CellLibrary& lib, std::span<const std::uint64_t> plaintexts,
                         std::span<const std::uint8_t> key, const PowerModel& model, const StimulusPorts& ports) {
  model.validate();
  const Module& top = mapped.top_module();
  const auto cm = CompiledModule::compile(top, &lib);
  const auto pt_id = top.find_net(ports.plaintext);
  const auto key_id = top.find_net(ports.key);
  if (!pt_id || top.net(*pt_id).dir != PortDir::kInput) throw Error(ErrorKind::kValidation, "no input port " + ports.plaintext);
  if (!key_id || top.net(*key_id).dir != PortDir::kInput) throw Error(ErrorKind::kValidation, "no input port " + ports.key);
  const int pt_width = top.net(*pt_id).width;
  const int key_width = top.net(*key_id).width;
  if (pt_width > 64 || key_width > 64) throw Error(ErrorKind::kValidation, "width mismatch: ports wider than 64 bits");
  if (static_cast<int>(key.size()) != (key_width + 7) / 8) throw Error(ErrorKind::kValidation, "width mismatch: key length");
  const std::uint64_t pt_mask = pt_width == 64 ? ~0ULL : ((1ULL << pt_width) - 1);
  const std::uint64_t key_mask = key_width == 64 ? ~0ULL : ((1ULL << key_width) - 1);
  const std::uint64_t kw = key_word(key);
  if (kw & ~key_mask) throw Error(ErrorKind::kValidation, "width mismatch: key exceeds port");
  for (auto p : plaintexts) {
    if (p & ~pt_mask) throw Error(ErrorKind::kValidation, "width mismatch: plaintext exceeds port");
  }

  // Switching and static weights per node output and register.
  struct Load {
    int bit;
    double toggle;
  };
  std::vector<Load> loads;
  double static_power = 0.0;
  auto attrs = [&](bool is_cell, int cell) -> std::pair<double, double> {
    if (!is_cell) return {1.0, 1.0};
    const auto& c = lib.cell(cell);
    return {c.cap, c.ds};
  };
  for (const auto& node : cm.nodes()) {
    auto [cap, ds] = attrs(node.is_cell, node.cell);
    for (int b : node.outs) loads.push_back({b, model.w_cap * cap + model.w_ds * ds});
    static_power += model.static_w * cap;
  }
  for (const auto& r : cm.registers()) {
    auto [cap, ds] = attrs(r.is_cell, r.cell);
    loads.push_back({r.q, model.w_cap * cap + model.w_ds * ds});
    static_power += model.static_w * cap;
  }

  const std::size_t n = plaintexts.size();
  const std::size_t words = std::max<std::size_t>(1, (n + 63) / 64);
  const int cycles = model.cycles > 0 ? model.cycles : (cm.registers().empty() ? 1 : 2);
  const std::size_t bits = static_cast<std::size_t>(cm.num_bits());
  std::vector<std::uint64_t> prev(bits * words, 0), cur;
  cm.eval(prev, words);
  cur = prev;
  for (int b = 0; b < pt_width; ++b) {
    auto* w = &cur[static_cast<std::size_t>(cm.bit_index({*pt_id, b})) * words];
    for (std::size_t t = 0; t < n; ++t) {
      if (plaintexts[t] >> b & 1) w[t / 64] |= 1ULL << (t % 64);
    }
  }
  for (int b = 0; b < key_width; ++b) {
    auto* w = &cur[static_cast<std::size_t>(cm.bit_index({*key_id, b})) * words];
    const std::uint64_t v = (kw >> b & 1) ? ~0ULL : 0ULL;
    for (std::size_t i = 0; i < words; ++i) w[i] = v;
  }

  Eigen::MatrixXd power = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), cycles, static_power);
  for (int c = 0; c < cycles; ++c) {
    if (c > 0) {
      for (const auto& r : cm.registers()) {
        std::copy_n(&cur[static_cast<std::size_t>(r.d) * words], words, &cur[static_cast<std::size_t>(r.q) * words]);
      }
    }
    cm.eval(cur, words);
    for (const auto& load : loads) {
      const auto* a = &prev[static_cast<std::size_t>(load.bit) * words];
      const auto* b = &cur[static_cast<std::size_t>(load.bit) * words];
      for (std::size_t i = 0; i < words; ++i) {
        for (std::uint64_t d = a[i] ^ b[i]; d; d &= d - 1) {
          const std::size_t t = i * 64 + static_cast<std::size_t>(std::countr_zero(d));
          if (t < n) power(static_cast<Eigen::Index>(t), c) += load.toggle;
        }
      }
    }
    prev = cur;
  }
  if (model.noise_sigma > 0.0) {
    for (std::size_t t = 0; t < n; ++t) {
      std::mt19937_64 rng(model.seed ^ static_cast<std::uint64_t>(t));
      std::normal_distribution<double> noise(0.0, model.noise_sigma);
      for (int c = 0; c < cycles; ++c) power(static_cast<Eigen::Index>(t), c) += noise(rng);
    }
  }
  if (!power.allFinite()) throw Error(ErrorKind::kNumeric, "non-finite power sample");

  TraceSet ts;
  ts.plaintexts.assign(plaintexts.begin(), plaintexts.end());
  ts.key.assign(key.begin(), key.end());
  ts.traces = power.cast<float>();
  ts.meta = top.name;
  return ts;
}

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error(ErrorKind::kIo, "truncated trace file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

constexpr std::uint32_t kTraceVersion = 1;

}  // namespace

void write_traces(const TraceSet& ts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out.write("PSYN", 4);
  put<std::uint32_t>(out, kTraceVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ts.num_traces()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ts.num_samples()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ts.key.size()));
  out.write(reinterpret_cast<const char*>(ts.key.data()), static_cast<std::streamsize>(ts.key.size()));
  for (auto p : ts.plaintexts) put<std::uint64_t>(out, p);
  for (int t = 0; t < ts.num_traces(); ++t) {
    for (int s = 0; s < ts.num_samples(); ++s) put<float>(out, ts.traces(t, s));
  }
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

TraceSet read_traces(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "PSYN", 4) != 0) throw Error(ErrorKind::kIo, path + " is not a trace file");
  if (get<std::uint32_t>(in) != kTraceVersion) throw Error(ErrorKind::kIo, "unsupported trace file version");
  const auto n = get<std::uint32_t>(in);
  const auto s = get<std::uint32_t>(in);
  const auto k = get<std::uint32_t>(in);
  TraceSet ts;
  ts.key.resize(k);
  if (!in.read(reinterpret_cast<char*>(ts.key.data()), k)) throw Error(ErrorKind::kIo, "truncated trace file");
  ts.plaintexts.resize(n);
  for (auto& p : ts.plaintexts) p = get<std::uint64_t>(in);
  ts.traces.resize(n, s);
  for (std::uint32_t t = 0; t < n; ++t) {
    for (std::uint32_t j = 0; j < s; ++j) ts.traces(t, j) = get<float>(in);
  }
  return ts;
}

void write_traces_csv(const TraceSet& ts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << "trace,plaintext";
  for (int s = 0; s < ts.num_samples(); ++s) out << ",s" << s;
  out << '\n';
  char buf[32];
  for (int t = 0; t < ts.num_traces(); ++t) {
    out << t << ',' << ts.plaintexts[t];
    for (int s = 0; s < ts.num_samples(); ++s) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(ts.traces(t, s)));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace scmap
