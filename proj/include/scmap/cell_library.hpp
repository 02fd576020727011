// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scmap/truth_table.hpp"

namespace scmap {

/// Boolean expression over a cell's input pins, compiled to a postfix
/// program that evaluates bit-parallel over 64-bit words.
class BoolExpr {
 public:
  enum class Op : std::uint8_t { kPin, kConst0, kConst1, kNot, kAnd, kOr, kXor };
  struct Instr {
    Op op;
    int pin = 0;
  };

  /// Operators: `!` (highest), `&`, `^`, `|` (lowest), parentheses, and the
  /// constants `0` / `1`.
  static BoolExpr parse(std::string_view text,
                        std::span<const std::string> pins);

  /// Evaluates one word; `inputs[i]` holds the lanes of pin i.
  std::uint64_t eval(std::span<const std::uint64_t> inputs) const;

  std::span<const Instr> program() const noexcept { return program_; }

 private:
  std::vector<Instr> program_;
};

struct StdCell {
  std::string name;
  std::vector<std::string> inputs;
  std::string output;
  std::string function;
  double ds = 1.0;
  double cap = 1.0;
  double area = 0.0;
  bool is_sequential = false;
  BoolExpr expr;
};

class CellLibrary {
 public:
  CellLibrary() = default;
  CellLibrary(std::string name, std::string node_label,
              std::vector<StdCell> cells);

  const std::string& name() const noexcept { return name_; }
  const std::string& node_label() const noexcept { return node_label_; }
  std::span<const StdCell> cells() const noexcept { return cells_; }
  const StdCell& cell(int index) const { return cells_.at(index); }
  int size() const noexcept { return static_cast<int>(cells_.size()); }

  std::optional<int> find(std::string_view name) const;
  const StdCell& at(std::string_view name) const;

  /// Cached single-output table of a combinational cell.
  const TruthTable& table(int index) const { return tables_.at(index); }

  int max_arity() const noexcept { return max_arity_; }

  /// Cells whose table equals `target` under some input permutation. Each hit
  /// carries the permutation: target input i drives cell pin perm[i].
  struct Match {
    int cell;
    std::vector<int> perm;
  };
  std::vector<Match> match(const TruthTable& target) const;

  /// Smallest-area match, ties to the lower cell index.
  std::optional<Match> cheapest_match(const TruthTable& target) const;

  /// Smallest-area sequential cell.
  int default_flop() const;

  /// Combinational cells with an identical table (same pin order).
  std::span<const int> same_function(int index) const {
    return same_function_.at(index);
  }

 private:
  std::string name_;
  std::string node_label_;
  std::vector<StdCell> cells_;
  std::vector<TruthTable> tables_;
  std::vector<std::vector<int>> same_function_;
  std::map<std::string, int, std::less<>> by_name_;
  std::map<std::pair<int, std::vector<std::uint32_t>>, std::vector<Match>> match_index_;
  int max_arity_ = 0;
};

/// Parses the library JSON document and validates the completeness and
/// drive-family invariants.
CellLibrary parse_library(std::string_view json_text);
CellLibrary load_library(const std::string& path);

TruthTable cell_truth_table(const StdCell& cell);

struct ScalarAttributes {
  double ds;
  double cap;
};
inline ScalarAttributes scalar_attributes(const StdCell& cell) {
  return {cell.ds, cell.cap};
}

/// Canonical tables of the primitive functions used by decomposition.
namespace prim {
TruthTable inv();
TruthTable buf();
TruthTable and2();
TruthTable or2();
TruthTable nand2();
TruthTable nor2();
TruthTable xor2();
TruthTable xnor2();
}  // namespace prim

}  // namespace scmap
