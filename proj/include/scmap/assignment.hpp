// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scmap/cell_library.hpp"
#include "scmap/combination.hpp"
#include "scmap/mapper.hpp"
#include "scmap/vulnerability.hpp"

namespace scmap {

struct CostWeights {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  void validate() const;
};

/// Sum over cells of alpha*SV/DS + beta*IO*C + gamma*F*DS.
double mapping_cost(const VulnerabilityProfile& profile,
                    const CandidateCombination& comb, const CellLibrary& lib,
                    const CostWeights& w);

/// One row of the bipartite graph.
struct BlockTarget {
  int block_id = 0;
  VulnerabilityProfile profile;
  TruthTable table;
};

/// Rows are blocks, columns are candidate instances (set index, position in
/// set). Infeasible edges hold +infinity.
struct CostMatrix {
  std::vector<int> rows;
  std::vector<std::pair<int, int>> cols;
  Eigen::MatrixXd cost;
};

/// Edges join a block to every candidate realizing its table. Candidates
/// containing a cell with ds below `min_ds` are dropped.
CostMatrix build_bipartite(const std::vector<BlockTarget>& blocks,
                           const std::vector<CandidateSet>& sets,
                           const CellLibrary& lib, const CostWeights& w,
                           double min_ds = 0.0);

struct Assignment {
  std::vector<int> row_to_col;
  double total = 0.0;
};

/// Minimum-cost assignment of every row to a distinct column. Non-square
/// matrices are padded; infinite entries are infeasible.
Assignment hungarian(const Eigen::MatrixXd& cost);

enum class SolveMode { kReplicated, kExclusive };
std::string_view to_string(SolveMode mode);
SolveMode parse_solve_mode(std::string_view text);

struct MappedBlock {
  CandidateCombination comb;
  double cost = 0.0;
  std::pair<int, int> column{-1, -1};
};

struct MappingSolution {
  std::map<int, MappedBlock> assignment;
  double total_cost = 0.0;
  SolveMode mode = SolveMode::kReplicated;
};

MappingSolution solve_mapping(const std::vector<BlockTarget>& blocks,
                              const std::vector<CandidateSet>& sets,
                              const CellLibrary& lib, const CostWeights& w,
                              SolveMode mode, double min_ds = 0.0);

}  // namespace scmap
