// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "scmap/assignment.hpp"
#include "scmap/error.hpp"
#include "test_util.hpp"

namespace scmap {
namespace {

using testing::make_library;
using testing::minimal_cells;

double brute_force(const Eigen::MatrixXd& c) {
  std::vector<int> cols(c.cols());
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // Injections of rows into columns: permutations of all columns, first
  // rows() entries used; duplicates of the same prefix are harmless.
  do {
    double s = 0;
    for (int r = 0; r < c.rows(); ++r) s += c(r, cols[r]);
    best = std::min(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

CellLibrary sized_library() {
  auto cells = minimal_cells();
  cells.push_back({"INV_X2", {"a"}, "!a", 2.0, 1.8, 1.33});
  cells.push_back({"INV_X4", {"a"}, "!a", 4.0, 3.4, 2.0});
  return make_library(cells);
}

CandidateCombination single(const CellLibrary& lib, const char* name) {
  CandidateCombination c;
  c.num_inputs = 1;
  c.nodes = {{*lib.find(name), {0}}};
  c.outputs = {1};
  c.table = lib.table(*lib.find(name));
  return c;
}

TEST(Hungarian, SmallExample) {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const Assignment a = hungarian(c);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{1, 0, 2}));
  EXPECT_DOUBLE_EQ(a.total, 5.0);
}

TEST(Hungarian, ZeroDiagonal) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Ones(5, 5) - Eigen::MatrixXd::Identity(5, 5);
  const Assignment a = hungarian(c);
  for (int r = 0; r < 5; ++r) EXPECT_EQ(a.row_to_col[r], r);
  EXPECT_DOUBLE_EQ(a.total, 0.0);
}

TEST(Hungarian, Singleton) {
  Eigen::MatrixXd c(1, 1);
  c << 7;
  const Assignment a = hungarian(c);
  EXPECT_EQ(a.row_to_col, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(a.total, 7.0);
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> cost(0, 50);
  for (int n = 2; n <= 7; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      Eigen::MatrixXd c(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = cost(rng);
      EXPECT_DOUBLE_EQ(hungarian(c).total, brute_force(c)) << c;
    }
  }
}

TEST(Hungarian, RectangularAndInfeasibleEntries) {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd c(2, 4);
  c << 5, inf, 1, 9, 2, inf, 1, inf;
  const Assignment a = hungarian(c);
  EXPECT_DOUBLE_EQ(a.total, 3.0);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{2, 0}));

  Eigen::MatrixXd tall(3, 2);
  tall.setZero();
  EXPECT_THROW(hungarian(tall), Error);

  Eigen::MatrixXd dead(2, 2);
  dead << 1, 2, inf, inf;
  EXPECT_THROW(hungarian(dead), Error);

  // Both rows can only use column 0.
  Eigen::MatrixXd clash(2, 2);
  clash << 1, inf, 1, inf;
  EXPECT_THROW(hungarian(clash), Error);
}

TEST(Cost, HandValues) {
  const CellLibrary lib = make_library({{"INV_X1", {"a"}, "!a", 1, 1, 1},
                                        {"INV_X2", {"a"}, "!a", 2, 2, 1},
                                        {"INVS_X2", {"a"}, "!a", 2.0, 0.5, 1},
                                        {"AND2_X1", {"a", "b"}, "a&b", 1, 1, 1},
                                        {"OR2_X1", {"a", "b"}, "a|b", 1, 1, 1},
                                        {"DFF_X1", {"d"}, "d", 1, 1, 1, true}});
  const CostWeights unit;
  VulnerabilityProfile p{0, 1, 3, 4, false, false};
  EXPECT_DOUBLE_EQ(mapping_cost(p, single(lib, "INVS_X2"), lib, unit), 10.0);

  VulnerabilityProfile zero{0, 0, 0, 0, false, false};
  EXPECT_DOUBLE_EQ(mapping_cost(zero, single(lib, "INV_X2"), lib, unit), 0.0);

  CandidateCombination two;
  two.num_inputs = 1;
  two.nodes = {{*lib.find("INV_X1"), {0}}, {*lib.find("INV_X2"), {1}}};
  two.outputs = {2};
  VulnerabilityProfile ones{0, 1, 1, 1, false, false};
  EXPECT_DOUBLE_EQ(mapping_cost(ones, two, lib, unit), 7.5);
}

TEST(Cost, WeightValidation) {
  EXPECT_THROW((CostWeights{0, 0, 0}.validate()), Error);
  EXPECT_THROW((CostWeights{-1, 1, 1}.validate()), Error);
  EXPECT_THROW((CostWeights{std::nan(""), 1, 1}.validate()), Error);
  EXPECT_NO_THROW((CostWeights{0, 0, 1}.validate()));
}

CandidateCombination and_variant(const CellLibrary& lib, int which) {
  const int and2 = *lib.find("AND2_X1");
  const int or2 = *lib.find("OR2_X1");
  const int inv = *lib.find("INV_X1");
  CandidateCombination c;
  c.num_inputs = 2;
  if (which == 0) c.nodes = {{and2, {0, 1}}};
  if (which == 1) c.nodes = {{and2, {0, 1}}, {inv, {2}}, {inv, {3}}};
  if (which == 2) c.nodes = {{inv, {0}}, {inv, {1}}, {or2, {2, 3}}, {inv, {4}}};
  c.outputs = {c.num_inputs + c.size() - 1};
  c.table = prim::and2();
  return c;
}

TEST(Bipartite, ReplicatedShape) {
  const CellLibrary lib = sized_library();
  std::vector<BlockTarget> blocks{{0, {0, 1, 1, 1, false, false}, prim::inv()},
                                  {1, {1, 1, 1, 1, false, false}, prim::and2()}};
  std::vector<CandidateSet> sets{{0, {single(lib, "INV_X1"), single(lib, "INV_X2"), single(lib, "INV_X4")}},
                                 {1, {and_variant(lib, 0), and_variant(lib, 1), and_variant(lib, 2)}}};
  const CostMatrix m = build_bipartite(blocks, sets, lib, {});
  ASSERT_EQ(m.cost.rows(), 2);
  ASSERT_EQ(m.cost.cols(), 6);
  for (int r = 0; r < 2; ++r) {
    int finite = 0;
    for (int c = 0; c < 6; ++c) finite += std::isfinite(m.cost(r, c));
    EXPECT_EQ(finite, 3);
  }
  // Each row keeps its own minimum edge after solving.
  const auto s = solve_mapping(blocks, sets, lib, {}, SolveMode::kReplicated);
  for (int r = 0; r < 2; ++r) {
    const auto& mb = s.assignment.at(r);
    EXPECT_DOUBLE_EQ(mb.cost, m.cost.row(r).minCoeff());
  }
}

TEST(Bipartite, EquivalentCandidatesOfOtherBlocksAreFeasible) {
  const CellLibrary lib = sized_library();
  std::vector<BlockTarget> blocks{{0, {0, 1, 1, 1, false, false}, prim::inv()},
                                  {1, {1, 1, 1, 1, false, false}, prim::inv()}};
  std::vector<CandidateSet> sets{{0, {single(lib, "INV_X1"), single(lib, "INV_X2")}},
                                 {1, {single(lib, "INV_X4")}}};
  const CostMatrix m = build_bipartite(blocks, sets, lib, {});
  EXPECT_TRUE(m.cost.allFinite());
}

TEST(Bipartite, EmptySetIsError) {
  const CellLibrary lib = sized_library();
  std::vector<BlockTarget> blocks{{0, {0, 1, 1, 1, false, false}, prim::inv()}};
  std::vector<CandidateSet> sets{{0, {}}};
  EXPECT_THROW(build_bipartite(blocks, sets, lib, {}), Error);
}

TEST(Solve, PicksCheapest) {
  const CellLibrary lib = sized_library();
  // SV=1 only: cost is alpha / DS, so the strongest drive wins.
  std::vector<BlockTarget> blocks{{0, {0, 1, 0, 0, false, false}, prim::inv()}};
  std::vector<CandidateSet> sets{{0, {single(lib, "INV_X2"), single(lib, "INV_X4"), single(lib, "INV_X1")}}};
  const auto s = solve_mapping(blocks, sets, lib, {}, SolveMode::kReplicated);
  EXPECT_EQ(s.assignment.at(0).column, (std::pair<int, int>{0, 1}));
  EXPECT_DOUBLE_EQ(s.total_cost, 0.25);
}

TEST(Solve, ExclusiveUsesSecondBest) {
  const CellLibrary lib = sized_library();
  std::vector<BlockTarget> blocks{{0, {0, 1, 0, 0, false, false}, prim::inv()},
                                  {1, {1, 1, 0, 0, false, false}, prim::inv()}};
  std::vector<CandidateSet> sets{{0, {single(lib, "INV_X4"), single(lib, "INV_X2")}}};
  const auto rep = solve_mapping(blocks, sets, lib, {}, SolveMode::kReplicated);
  EXPECT_DOUBLE_EQ(rep.total_cost, 0.5);
  EXPECT_EQ(rep.assignment.at(0).column, rep.assignment.at(1).column);
  const auto ex = solve_mapping(blocks, sets, lib, {}, SolveMode::kExclusive);
  EXPECT_DOUBLE_EQ(ex.total_cost, 0.25 + 0.5);
  EXPECT_NE(ex.assignment.at(0).column, ex.assignment.at(1).column);
  EXPECT_LE(rep.total_cost, ex.total_cost);
}

TEST(Solve, ScalingWeightsScalesTotal) {
  const CellLibrary lib = sized_library();
  std::vector<BlockTarget> blocks{{0, {0, 1, 2, 3, false, false}, prim::inv()},
                                  {1, {1, 0, 5, 1, false, false}, prim::inv()}};
  std::vector<CandidateSet> sets{{0, {single(lib, "INV_X1"), single(lib, "INV_X2"), single(lib, "INV_X4")}},
                                 {1, {single(lib, "INV_X1"), single(lib, "INV_X2"), single(lib, "INV_X4")}}};
  for (auto mode : {SolveMode::kReplicated, SolveMode::kExclusive}) {
    const auto a = solve_mapping(blocks, sets, lib, {1, 2, 0.5}, mode);
    const auto b = solve_mapping(blocks, sets, lib, {10, 20, 5}, mode);
    for (const auto& [id, mb] : a.assignment) EXPECT_EQ(mb.column, b.assignment.at(id).column);
    EXPECT_NEAR(b.total_cost, 10 * a.total_cost, 1e-9);
  }
}

TEST(Solve, MinDriveFilter) {
  const CellLibrary lib = sized_library();
  std::vector<BlockTarget> blocks{{0, {0, 0, 1, 0, false, false}, prim::inv()}};
  std::vector<CandidateSet> sets{{0, {single(lib, "INV_X1"), single(lib, "INV_X4")}}};
  const auto s = solve_mapping(blocks, sets, lib, {}, SolveMode::kReplicated, 2.0);
  EXPECT_EQ(s.assignment.at(0).column, (std::pair<int, int>{0, 1}));
  EXPECT_THROW(solve_mapping(blocks, sets, lib, {}, SolveMode::kReplicated, 16.0), Error);
}

TEST(Solve, ModeNames) {
  EXPECT_EQ(parse_solve_mode("replicated"), SolveMode::kReplicated);
  EXPECT_EQ(parse_solve_mode("exclusive"), SolveMode::kExclusive);
  EXPECT_EQ(to_string(SolveMode::kExclusive), "exclusive");
  EXPECT_THROW(parse_solve_mode("greedy"), Error);
}

}  // namespace
}  // namespace scmap
