// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scmap/cell_library.hpp"
#include "scmap/netlist.hpp"

namespace scmap {

/// Per-cycle power: sum over toggling cells of w_cap*C + w_ds*DS, plus
/// static_w times the total cell capacitance, plus Gaussian noise.
struct PowerModel {
  double w_cap = 1.0;
  double w_ds = 0.5;
  double static_w = 0.01;
  double noise_sigma = 0.5;
  std::uint64_t seed = 1;
  int cycles = 0;  // 0: one sample per register stage plus the input edge

  void validate() const;
};

struct TraceSet {
  std::vector<std::uint64_t> plaintexts;
  std::vector<std::uint8_t> key;
  Eigen::MatrixXf traces;  // num_traces x num_samples
  std::string meta;

  int num_traces() const noexcept { return static_cast<int>(traces.rows()); }
  int num_samples() const noexcept { return static_cast<int>(traces.cols()); }
};

struct StimulusPorts {
  std::string plaintext = "pt";
  std::string key = "key";
};

/// Simulates the top module from an all-zero reset. Sample 0 covers the
/// application of (plaintext, key); each further sample follows one clock
/// edge. Trace t draws its noise from a generator seeded with seed ^ t.
TraceSet simulate_traces(const Design& mapped, const CellLibrary& lib,
                         std::span<const std::uint64_t> plaintexts,
                         std::span<const std::uint8_t> key,
                         const PowerModel& model,
                         const StimulusPorts& ports = {});

inline int hamming_weight(std::uint64_t x) { return std::popcount(x); }
inline int hamming_distance(std::uint64_t a, std::uint64_t b) {
  return std::popcount(a ^ b);
}

/// Key bytes of a key word for a port of `width` bits, least significant
/// byte first.
std::vector<std::uint8_t> key_bytes(std::uint64_t key, int width);
std::uint64_t key_word(std::span<const std::uint8_t> key);

void write_traces(const TraceSet& ts, const std::string& path);
TraceSet read_traces(const std::string& path);
void write_traces_csv(const TraceSet& ts, const std::string& path);

}  // namespace scmap
