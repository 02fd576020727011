// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "scmap/error.hpp"
#include "scmap/netlist.hpp"
#include "scmap/power_sim.hpp"
#include "scmap/sca_eval.hpp"

namespace scmap {
namespace {

// Rows of PRESENT's 4-bit substitution table, written out independently of
// the library.
constexpr int kSbox[16] = {0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
                           0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2};

int popcount4(int x) { return (x & 1) + (x >> 1 & 1) + (x >> 2 & 1) + (x >> 3 & 1); }

// Noiseless traces with a noise column, the leaking column and a constant.
TraceSet synthetic(int key, int n, std::uint64_t seed, bool single_bit) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  TraceSet ts;
  ts.key = {static_cast<std::uint8_t>(key)};
  ts.traces.resize(n, 3);
  for (int t = 0; t < n; ++t) {
    const int p = static_cast<int>(rng() & 0xF);
    ts.plaintexts.push_back(static_cast<std::uint64_t>(p));
    const int s = kSbox[p ^ key];
    ts.traces(t, 0) = static_cast<float>(g(rng));
    ts.traces(t, 1) = static_cast<float>(single_bit ? (s & 1) : popcount4(s));
    ts.traces(t, 2) = 3.0f;
  }
  return ts;
}

TEST(Cpa, RecoversEveryKeyWithUnitCorrelation) {
  for (int key = 0; key < 16; ++key) {
    const auto r = cpa_attack(synthetic(key, 200, 11 + key, false), present_target());
    EXPECT_TRUE(r.success) << key;
    EXPECT_EQ(r.ranked.front(), key);
    EXPECT_NEAR(r.statistic(key), 1.0, 1e-12);
    EXPECT_EQ(r.statistic.size(), 16);
  }
}

TEST(Cpa, ConstantTracesGiveZeroStatistics) {
  TraceSet ts = synthetic(5, 50, 1, false);
  ts.traces.setConstant(2.0f);
  const auto r = cpa_attack(ts, present_target());
  EXPECT_TRUE(r.statistic.isZero());
  for (int i = 0; i < 16; ++i) EXPECT_EQ(r.ranked[i], i);
}

TEST(Cpa, AffineInvariance) {
  TraceSet ts = synthetic(9, 300, 4, false);
  std::mt19937_64 rng(3);
  std::normal_distribution<float> g(0.0f, 0.7f);
  for (int t = 0; t < ts.num_traces(); ++t) ts.traces(t, 1) += g(rng);
  const auto a = cpa_attack(ts, present_target());
  ts.traces = (ts.traces.array() * 3.5f + 10.0f).matrix();
  const auto b = cpa_attack(ts, present_target());
  EXPECT_TRUE(a.statistic.isApprox(b.statistic, 1e-5));
  EXPECT_EQ(a.ranked, b.ranked);
}

TEST(Cpa, PureNoiseTrueKeyIsUnremarkable) {
  int first = 0;
  for (int trial = 0; trial < 40; ++trial) {
    TraceSet ts = synthetic(trial % 16, 100, 1000 + trial, false);
    ts.traces.col(1).setZero();
    const auto r = cpa_attack(ts, present_target());
    first += r.success;
    for (int k = 0; k < 16; ++k) EXPECT_LT(r.statistic(k), 0.6);
  }
  EXPECT_LT(first, 15);
}

TEST(Cpa, TooFewTraces) {
  EXPECT_THROW(cpa_attack(synthetic(0, 1, 1, false), present_target()), Error);
}

TEST(Dpa, SingleBitLeakage) {
  for (int key = 0; key < 16; ++key) {
    const auto r = dpa_attack(synthetic(key, 400, 70 + key, true), present_target(), 0);
    EXPECT_DOUBLE_EQ(r.statistic(key), 1.0);
    EXPECT_LE(r.statistic.maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(Dpa, IdenticalPlaintextsAreDegenerate) {
  TraceSet ts = synthetic(3, 100, 5, true);
  for (auto& p : ts.plaintexts) p = 6;
  const auto r = dpa_attack(ts, present_target(), 1);
  EXPECT_TRUE(r.statistic.isZero());
}

TEST(Dpa, BitOutOfRange) {
  EXPECT_THROW(dpa_attack(synthetic(0, 10, 1, true), present_target(), 4), Error);
}

TEST(SuccessRate, Examples) {
  std::vector<char> o(50, 0);
  o[3] = o[17] = o[40] = 1;
  EXPECT_DOUBLE_EQ(success_rate(o), 0.06);
  EXPECT_DOUBLE_EQ(success_rate(std::vector<char>(7, 0)), 0.0);
  EXPECT_THROW(success_rate(std::vector<char>{}), Error);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Welch, Examples) {
  EXPECT_DOUBLE_EQ(welch_t(vec({1, 2, 3, 4}), vec({1, 2, 3, 4})), 0.0);
  EXPECT_NEAR(welch_t(vec({1, 2, 3}), vec({4, 5, 6})), -3.0 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_THROW(welch_t(vec({5, 5, 5}), vec({5, 5, 5})), Error);
  EXPECT_THROW(welch_t(vec({1}), vec({1, 2})), Error);
}

TEST(Welch, AntisymmetryAndShift) {
  const auto a = vec({0.3, 1.7, 2.2, 5.0, -1.0});
  const auto b = vec({2.0, 2.5, 4.1});
  EXPECT_NEAR(welch_t(a, b), -welch_t(b, a), 1e-12);
  const auto a2 = (a.array() + 100.0).matrix();
  const auto b2 = (b.array() + 100.0).matrix();
  EXPECT_NEAR(welch_t(a, b), welch_t(a2, b2), 1e-9);
}

TEST(Tvla, IdenticalSetsGiveZero) {
  TraceSet a = synthetic(1, 100, 9, false);
  const auto r = tvla(a, a);
  EXPECT_DOUBLE_EQ(r.max_abs_t, 0.0);
  EXPECT_EQ(r.exceed_count, 0);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0], 2);
  EXPECT_TRUE(std::isnan(r.t_values(2)));
}

TEST(Tvla, FixedVersusRandomLeaks) {
  TraceSet random = synthetic(1, 500, 9, false);
  TraceSet fixed = random;
  for (int t = 0; t < fixed.num_traces(); ++t) fixed.traces(t, 1) = 0.0f;
  fixed.traces(0, 1) = 1.0f;
  const auto r = tvla(fixed, random);
  EXPECT_GT(r.max_abs_t, kTvlaThreshold);
  EXPECT_GE(r.exceed_count, 1);
  int count = 0;
  for (Eigen::Index s = 0; s < r.t_values.size(); ++s) {
    if (!std::isnan(r.t_values(s)) && std::abs(r.t_values(s)) > r.threshold) ++count;
  }
  EXPECT_EQ(count, r.exceed_count);
}

TEST(Tvla, LengthMismatch) {
  TraceSet a = synthetic(1, 10, 1, false);
  TraceSet b = a;
  b.traces.conservativeResize(10, 2);
  EXPECT_THROW(tvla(a, b), Error);
}

TEST(MutualInformation, IdentityLeakage) {
  std::mt19937_64 rng(2);
  std::vector<int> k(100000);
  std::vector<double> l(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = static_cast<int>(rng() & 0xF);
    l[i] = k[i];
  }
  EXPECT_NEAR(estimate_mutual_information(k, l, 16), 4.0, 0.05);
}

TEST(MutualInformation, IndependentLeakage) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<int> k(100000);
  std::vector<double> l(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = static_cast<int>(rng() & 0xF);
    l[i] = g(rng);
  }
  const double mi = estimate_mutual_information(k, l, 16);
  EXPECT_GE(mi, 0.0);
  EXPECT_LE(mi, 0.05);
}

TEST(MutualInformation, Errors) {
  EXPECT_THROW(estimate_mutual_information(std::vector<int>{}, std::vector<double>{}), Error);
  EXPECT_THROW(estimate_mutual_information(std::vector<int>{1}, std::vector<double>{1.0}, 1), Error);
}

std::string chain(const std::vector<std::string>& cells) {
  std::string s = "module top\n  wire 1 input a\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    s += "  wire 1 " + std::string(i + 1 == cells.size() ? "output" : "internal") + " n" + std::to_string(i) + "\n";
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string in = i == 0 ? "a" : "n" + std::to_string(i - 1);
    s += "  inst " + cells[i] + " b" + std::to_string(i) + "/0 a=" + in + " y=n" + std::to_string(i) + "\n";
  }
  return s + "end\n";
}

TEST(NetlistChange, Examples) {
  std::vector<std::string> cells(10, "INV_X1");
  const Design a = parse_netlist(chain(cells));
  EXPECT_DOUBLE_EQ(netlist_change(a, a), 0.0);
  cells[2] = cells[7] = "INV_X2";
  EXPECT_DOUBLE_EQ(netlist_change(a, parse_netlist(chain(cells))), 20.0);
}

}  // namespace
}  // namespace scmap
