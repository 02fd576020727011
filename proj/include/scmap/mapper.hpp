// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "scmap/cell_library.hpp"
#include "scmap/combination.hpp"
#include "scmap/truth_table.hpp"

namespace scmap {

struct CandidateSet {
  int target = -1;  // block id
  std::vector<CandidateCombination> combinations;
};

struct SAConfig {
  double initial_temp = 10.0;
  double cooling_rate = 0.95;
  int iterations = 1000;
  int max_cells = 8;
  int keep_top_k = 5;
  std::uint64_t seed = 1;
  double w_area = 1.0;
  double w_power = 1.0;

  /// Throws a validation error when a field is out of range.
  void validate() const;
};

/// Single-cell matches of a single-output table, one per library cell.
std::vector<CandidateCombination> find_direct(const TruthTable& table,
                                              const CellLibrary& lib);

/// Sum-of-products network per output over AND, OR and NOT. Literals and
/// shared product prefixes are built once.
PrimitiveDag decompose(const TruthTable& table);

/// Library covers of a primitive network under several cover styles, each
/// verified exhaustively and kept only if it fits `max_cells`.
std::vector<CandidateCombination> explore_indirect(const PrimitiveDag& dag,
                                                   const CellLibrary& lib,
                                                   int max_cells);

/// Size of the smallest cover `explore_indirect` finds with no cell limit.
int smallest_indirect_size(const PrimitiveDag& dag, const CellLibrary& lib);

/// Objective minimized by annealing: w_area * area + w_power * sum of cap.
double sa_objective(const CandidateCombination& comb, const CellLibrary& lib,
                    const SAConfig& cfg);

/// Anneals over cell substitution, local rewrites and inverter-pair
/// insertion or removal, returning the keep_top_k distinct lowest-objective
/// combinations encountered.
CandidateSet simulated_annealing(const std::vector<CandidateCombination>& seeds,
                                 const TruthTable& target,
                                 const CellLibrary& lib, const SAConfig& cfg);

}  // namespace scmap
