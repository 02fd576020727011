// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scmap/cell_library.hpp"
#include "scmap/combination.hpp"
#include "scmap/netlist.hpp"
#include "scmap/truth_table.hpp"

namespace scmap {

/// First row where the tables differ, if any. Throws on shape mismatch.
std::optional<std::size_t> first_mismatch(const TruthTable& f,
                                          const TruthTable& g);
bool equivalent_exhaustive(const TruthTable& f, const TruthTable& g);

/// Label-preserving DAG isomorphism with cells labeled by their function.
/// Cone inputs map to themselves and outputs correspond by position.
bool isomorphic(const CandidateCombination& a, const CandidateCombination& b,
                const CellLibrary& lib);

struct ConeVerdict {
  std::string id;
  std::vector<std::string> inputs;
  bool equivalent = false;
  bool unverifiable = false;
  std::optional<std::string> counterexample;
};

struct EquivalenceReport {
  std::vector<ConeVerdict> cones;
  bool overall = false;

  std::string summary() const;
};

/// Compares every output-port and register-input cone of each module by
/// exhaustive evaluation over the union of both supports.
EquivalenceReport verify_design(const Design& original, const Design& mapped,
                                const CellLibrary& lib);

}  // namespace scmap
