// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/sca_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "scmap/error.hpp"

namespace scmap {

namespace {

constexpr std::uint8_t kPresentSbox[16] = {0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
                                           0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2};

std::vector<std::uint8_t> make_aes_sbox() {
  auto mul = [](std::uint8_t a, std::uint8_t b) {
    std::uint8_t r = 0;
    while (b) {
      if (b & 1) r ^= a;
      a = static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1B : 0));
      b >>= 1;
    }
    return r;
  };
  std::vector<std::uint8_t> s(256);
  for (int x = 0; x < 256; ++x) {
    std::uint8_t inv = 0;
    for (int y = 1; y < 256 && x; ++y) {
      if (mul(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)) == 1) {
        inv = static_cast<std::uint8_t>(y);
        break;
      }
    }
    std::uint8_t r = inv;
    for (int k = 1; k <= 4; ++k) r ^= static_cast<std::uint8_t>((inv << k) | (inv >> (8 - k)));
    s[x] = r ^ 0x63;
  }
  return s;
}

AttackResult rank(Eigen::VectorXd stat, const TraceSet& ts, const SboxTarget& target) {
  AttackResult r;
  r.statistic = std::move(stat);
  r.ranked.resize(static_cast<std::size_t>(target.guesses()));
  std::iota(r.ranked.begin(), r.ranked.end(), 0);
  std::stable_sort(r.ranked.begin(), r.ranked.end(), [&](int a, int b) { return r.statistic(a) > r.statistic(b); });
  r.best_key = r.ranked.front();
  r.true_key = static_cast<int>(target.slice(key_word(ts.key)));
  r.success = r.best_key == r.true_key;
  return r;
}

void check_target(const TraceSet& ts, const SboxTarget& target) {
  if (ts.num_traces() < 2) throw Error(ErrorKind::kValidation, "attacks need at least 2 traces");
  if (target.bits < 1 || target.bits > 16 || static_cast<int>(target.sbox.size()) != target.guesses()) {
    throw Error(ErrorKind::kValidation, "S-box target is malformed");
  }
}

}  // namespace

SboxTarget present_target(int nibble) {
  return {std::vector<std::uint8_t>(std::begin(kPresentSbox), std::end(kPresentSbox)), 4, 4 * nibble};
}

SboxTarget aes_target(int byte) { return {make_aes_sbox(), 8, 8 * byte}; }

AttackResult cpa_attack(const TraceSet& ts, const SboxTarget& target) {
  check_target(ts, target);
  const Eigen::Index n = ts.num_traces();
  const int g = target.guesses();
  Eigen::MatrixXd x = ts.traces.cast<double>();
  x.rowwise() -= x.colwise().mean();
  const Eigen::RowVectorXd xnorm = x.colwise().norm();
  Eigen::MatrixXd h(n, g);
  for (Eigen::Index t = 0; t < n; ++t) {
    const std::uint32_t p = target.slice(ts.plaintexts[t]);
    for (int k = 0; k < g; ++k) h(t, k) = hamming_weight(target.sbox[p ^ static_cast<std::uint32_t>(k)]);
  }
  h.rowwise() -= h.colwise().mean();
  const Eigen::RowVectorXd hnorm = h.colwise().norm();
  const Eigen::MatrixXd cov = h.transpose() * x;  // g x samples
  Eigen::VectorXd stat = Eigen::VectorXd::Zero(g);
  for (int k = 0; k < g; ++k) {
    for (Eigen::Index s = 0; s < x.cols(); ++s) {
      if (hnorm(k) == 0.0 || xnorm(s) == 0.0) continue;
      stat(k) = std::max(stat(k), std::abs(cov(k, s)) / (hnorm(k) * xnorm(s)));
    }
  }
  return rank(std::move(stat), ts, target);
}

AttackResult dpa_attack(const TraceSet& ts, const SboxTarget& target, int bit_index) {
  check_target(ts, target);
  if (bit_index < 0 || bit_index >= target.bits) throw Error(ErrorKind::kValidation, "DPA bit out of range");
  const Eigen::Index n = ts.num_traces();
  const int g = target.guesses();
  const Eigen::MatrixXd x = ts.traces.cast<double>();
  Eigen::VectorXd stat = Eigen::VectorXd::Zero(g);
  for (int k = 0; k < g; ++k) {
    Eigen::RowVectorXd sum1 = Eigen::RowVectorXd::Zero(x.cols());
    Eigen::RowVectorXd sum0 = Eigen::RowVectorXd::Zero(x.cols());
    Eigen::Index n1 = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const std::uint32_t p = target.slice(ts.plaintexts[t]);
      if (target.sbox[p ^ static_cast<std::uint32_t>(k)] >> bit_index & 1) {
        sum1 += x.row(t);
        ++n1;
      } else {
        sum0 += x.row(t);
      }
    }
    if (n1 == 0 || n1 == n) continue;
    const Eigen::RowVectorXd diff = sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n - n1);
    stat(k) = diff.cwiseAbs().maxCoeff();
  }
  return rank(std::move(stat), ts, target);
}

double success_rate(std::span<const char> outcomes) {
  if (outcomes.empty()) throw Error(ErrorKind::kValidation, "success rate of an empty outcome list");
  const auto hits = std::count_if(outcomes.begin(), outcomes.end(), [](char c) { return c != 0; });
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

double welch_t(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::kValidation, "welch_t needs at least 2 samples per group");
  const double ma = a.mean();
  const double mb = b.mean();
  const double va = (a.array() - ma).square().sum() / static_cast<double>(a.size() - 1);
  const double vb = (b.array() - mb).square().sum() / static_cast<double>(b.size() - 1);
  if (va == 0.0 && vb == 0.0) throw Error(ErrorKind::kNumeric, "welch_t undefined: both variances are zero");
  return (ma - mb) / std::sqrt(va / static_cast<double>(a.size()) + vb / static_cast<double>(b.size()));
}

TvlaResult tvla(const TraceSet& fixed, const TraceSet& random, double threshold) {
  if (fixed.num_samples() != random.num_samples()) throw Error(ErrorKind::kValidation, "sample-length mismatch");
  if (fixed.num_traces() < 2 || random.num_traces() < 2) throw Error(ErrorKind::kValidation, "TVLA needs at least 2 traces per set");
  TvlaResult r;
  r.threshold = threshold;
  r.t_values = Eigen::VectorXd::Constant(fixed.num_samples(), std::nan(""));
  for (int s = 0; s < fixed.num_samples(); ++s) {
    const Eigen::VectorXd a = fixed.traces.col(s).cast<double>();
    const Eigen::VectorXd b = random.traces.col(s).cast<double>();
    try {
      const double t = welch_t(a, b);
      r.t_values(s) = t;
      r.max_abs_t = std::max(r.max_abs_t, std::abs(t));
      if (std::abs(t) > threshold) ++r.exceed_count;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumeric) throw;
      r.excluded.push_back(s);
    }
  }
  return r;
}

double estimate_mutual_information(std::span<const int> keys, std::span<const double> leakages, int bins,
                                   std::optional<std::pair<double, double>> range) {
  if (keys.empty() || keys.size() != leakages.size()) throw Error(ErrorKind::kValidation, "MI needs equal, non-empty samples");
  if (bins < 2) throw Error(ErrorKind::kValidation, "MI needs at least 2 bins");
  double lo, hi;
  if (range) {
    std::tie(lo, hi) = *range;
  } else {
    auto [mn, mx] = std::minmax_element(leakages.begin(), leakages.end());
    lo = *mn;
    hi = *mx;
  }
  const double width = hi > lo ? (hi - lo) / bins : 1.0;
  std::map<int, int> key_index;
  for (int k : keys) key_index.emplace(k, 0);
  int next = 0;
  for (auto& [k, idx] : key_index) idx = next++;
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(next, bins);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    int b = static_cast<int>(std::floor((leakages[i] - lo) / width));
    b = std::clamp(b, 0, bins - 1);
    joint(key_index[keys[i]], b) += 1.0;
  }
  joint /= static_cast<double>(keys.size());
  const Eigen::VectorXd pk = joint.rowwise().sum();
  const Eigen::RowVectorXd pl = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index k = 0; k < joint.rows(); ++k) {
    for (Eigen::Index b = 0; b < joint.cols(); ++b) {
      const double p = joint(k, b);
      if (p > 0.0) mi += p * std::log2(p / (pk(k) * pl(b)));
    }
  }
  return std::max(0.0, mi);
}

double netlist_change(const Design& conventional, const Design& posyn) {
  auto census = [](const Design& d) {
    std::map<std::pair<std::string, std::string>, std::map<std::string, int>> cones;
    for (const auto& m : d.modules) {
      for (const auto& inst : m.instances) {
        auto slash = inst.name.rfind('/');
        std::string cone = slash == std::string::npos ? inst.name : inst.name.substr(0, slash);
        cones[{m.name, cone}][inst.cell]++;
      }
    }
    return cones;
  };
  const auto a = census(conventional);
  const auto b = census(posyn);
  int total = 0;
  int changed = 0;
  for (const auto& [cone, cells] : a) {
    auto it = b.find(cone);
    for (const auto& [cell, count] : cells) {
      total += count;
      int kept = 0;
      if (it != b.end()) {
        auto jt = it->second.find(cell);
        if (jt != it->second.end()) kept = std::min(count, jt->second);
      }
      changed += count - kept;
    }
  }
  if (total == 0) return 0.0;
  return 100.0 * changed / total;
}

}  // namespace scmap
