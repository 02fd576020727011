// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scmap/cell_library.hpp"
#include "scmap/truth_table.hpp"

namespace scmap {

/// Signal numbering shared by combinations and primitive DAGs: ids below
/// `num_inputs` are cone inputs, id `num_inputs + k` is the output of node k.
struct CombNode {
  int cell = 0;
  std::vector<int> fanin;  // fanin[p] drives cell pin p
};

/// A multi-cell realization of a cone function.
struct CandidateCombination {
  int num_inputs = 0;
  std::vector<CombNode> nodes;  // topological order
  std::vector<int> outputs;     // one signal per cone output
  TruthTable table;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
  bool is_node(int signal) const noexcept { return signal >= num_inputs; }
  int node_of(int signal) const noexcept { return signal - num_inputs; }
};

/// Exhaustive evaluation of the wiring.
TruthTable evaluate(const CandidateCombination& comb, const CellLibrary& lib);

double total_area(const CandidateCombination& comb, const CellLibrary& lib);
double total_cap(const CandidateCombination& comb, const CellLibrary& lib);

/// Structural well-formedness: fanins point backwards, pin counts match the
/// cells, and every output is a distinct node.
bool well_formed(const CandidateCombination& comb, const CellLibrary& lib);

/// Removes nodes that reach no output and renumbers the rest.
void prune(CandidateCombination& comb);

/// Order-independent structural hash. With `by_name` false cells are
/// labeled by their function, so drive variants hash alike.
std::uint64_t structural_hash(const CandidateCombination& comb,
                              const CellLibrary& lib, bool by_name = true);

std::string describe(const CandidateCombination& comb, const CellLibrary& lib);

enum class PrimOp : std::uint8_t { kAnd, kOr, kNot, kNand, kNor, kXor };

struct PrimNode {
  PrimOp op = PrimOp::kAnd;
  std::vector<int> fanin;
};

/// Boolean network over two-input primitives and inverters.
struct PrimitiveDag {
  int num_inputs = 0;
  std::vector<PrimNode> nodes;
  std::vector<int> outputs;

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

TruthTable evaluate(const PrimitiveDag& dag);

}  // namespace scmap
