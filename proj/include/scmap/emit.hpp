// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "scmap/assignment.hpp"
#include "scmap/cell_library.hpp"
#include "scmap/netlist.hpp"

namespace scmap {

/// Replaces every block by cell instances: combinational blocks by their
/// assigned combination, registers by the library's default flip-flop.
/// Instance names are `<block>/<k>`; registers keep the block name.
Design emit_design(const Design& design, const MappingSolution& solution,
                   const CellLibrary& lib);

std::string emit_netlist(const Design& design, const MappingSolution& solution,
                         const CellLibrary& lib);

}  // namespace scmap
