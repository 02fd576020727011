// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scmap/netlist.hpp"
#include "scmap/power_sim.hpp"

namespace scmap {

/// Sub-key attacked through an S-box: the `bits`-wide slices of plaintext
/// and key starting at bit `offset`.
struct SboxTarget {
  std::vector<std::uint8_t> sbox;
  int bits = 4;
  int offset = 0;

  int guesses() const noexcept { return 1 << bits; }
  std::uint32_t slice(std::uint64_t word) const {
    return static_cast<std::uint32_t>(word >> offset) & (guesses() - 1);
  }
};

SboxTarget present_target(int nibble = 0);
SboxTarget aes_target(int byte = 0);

struct AttackResult {
  std::vector<int> ranked;      // guesses, best first
  Eigen::VectorXd statistic;    // per guess
  int best_key = 0;
  int true_key = 0;
  bool success = false;
};

/// Max over samples of |Pearson(HW(Sbox(p ^ g)), sample)| per guess.
AttackResult cpa_attack(const TraceSet& ts, const SboxTarget& target);

/// Max over samples of |mean(bit=1) - mean(bit=0)| where the bit is
/// `bit_index` of Sbox(p ^ g).
AttackResult dpa_attack(const TraceSet& ts, const SboxTarget& target,
                        int bit_index);

double success_rate(std::span<const char> outcomes);

/// Welch's t with unbiased variances. Throws when both variances vanish.
double welch_t(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b);

inline constexpr double kTvlaThreshold = 4.5;

struct TvlaResult {
  Eigen::VectorXd t_values;  // NaN where undefined
  std::vector<int> excluded;
  double max_abs_t = 0.0;
  int exceed_count = 0;
  double threshold = kTvlaThreshold;
};

TvlaResult tvla(const TraceSet& fixed, const TraceSet& random,
                double threshold = kTvlaThreshold);

/// Plug-in estimate of I(K;L) in bits with equal-width bins on L. The bin
/// range defaults to the sample range.
double estimate_mutual_information(
    std::span<const int> keys, std::span<const double> leakages, int bins = 16,
    std::optional<std::pair<double, double>> range = std::nullopt);

/// Percentage of conventional instances whose (cone, cell) pair has no
/// counterpart in the other design. The cone of an instance is its name up
/// to the last '/'.
double netlist_change(const Design& conventional, const Design& posyn);

}  // namespace scmap
