// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scmap/truth_table.hpp"

namespace scmap {

enum class PortDir : std::uint8_t { kInput, kOutput, kInternal };

struct Net {
  int id = 0;
  std::string name;
  int width = 1;
  PortDir dir = PortDir::kInternal;
};

/// One bit of a net.
struct Signal {
  int net = 0;
  int bit = 0;
  auto operator<=>(const Signal&) const = default;
};

enum class BlockKind : std::uint8_t {
  kAnd,
  kOr,
  kXor,
  kNot,
  kNand,
  kNor,
  kMux,
  kAdd,
  kTable,
  kDff,
};

std::string_view to_string(BlockKind kind);
std::optional<BlockKind> parse_block_kind(std::string_view text);

/// Single-bit operator after bit-blasting. ADD is a one-bit adder slice
/// (a, b[, carry_in]) -> (sum[, carry_out]); MUX is (sel, a, b) -> sel ? b : a;
/// TABLE keeps its full width; DFF is a register cut point.
struct LogicBlock {
  int id = 0;
  BlockKind kind = BlockKind::kAnd;
  std::string name;
  std::vector<Signal> inputs;
  std::vector<Signal> outputs;
  std::optional<TruthTable> table;

  bool is_sequential() const noexcept { return kind == BlockKind::kDff; }
};

/// Function table a combinational block computes over its own pins.
TruthTable block_function(const LogicBlock& block);

/// Standard-cell instance of a mapped netlist. Pin directions are resolved
/// against a cell library when the module is compiled.
struct CellInstance {
  int id = 0;
  std::string cell;
  std::string name;
  std::vector<std::pair<std::string, Signal>> pins;
};

class Module {
 public:
  std::string name;
  std::vector<Net> nets;
  std::vector<LogicBlock> blocks;
  std::vector<CellInstance> instances;

  const Net& net(int id) const;
  std::optional<int> find_net(std::string_view net_name) const;
  const LogicBlock* find_block(int id) const;

  /// "a" for one-bit nets, "a[3]" otherwise.
  std::string signal_name(Signal s) const;

  std::vector<Signal> port_bits(PortDir dir) const;

 private:
  friend class DesignBuilder;
  int net_base_ = 0;
};

/// A parsed netlist. Designs are immutable once built; every transformation
/// produces a new value.
class Design {
 public:
  std::vector<Module> modules;
  std::string top;

  const Module& top_module() const;
  const Module* find_module(std::string_view name) const;

  /// Locates a block by its design-unique id.
  std::pair<const Module*, const LogicBlock*> find_block(int id) const;
  std::vector<int> block_ids() const;
};

/// Parses the line-oriented netlist format. Multi-bit operators are
/// bit-blasted; the first module is the top.
Design parse_netlist(std::string_view text);
Design load_netlist(const std::string& path);

/// Canonical text of a design (parse(print(d)) reproduces d).
std::string print_design(const Design& design);

/// Block input pins plus output-port bits reading any bit of `net_id`.
int compute_fanout(const Design& design, int net_id);

/// Fanout of a single bit within a module.
int bit_fanout(const Module& module, Signal s);

inline constexpr int kDefaultMaxConeInputs = 10;

/// Exhaustive function of a combinational cone. Boundary inputs appear in
/// first-read order; outputs are the cone bits visible outside it, in block
/// order.
struct Cone {
  std::vector<Signal> inputs;
  std::vector<Signal> outputs;
  TruthTable table;
};
Cone extract_cone(const Design& design, std::span<const int> block_ids,
                  int max_inputs = kDefaultMaxConeInputs);
TruthTable extract_truth_table(const Design& design,
                               std::span<const int> block_ids,
                               int max_inputs = kDefaultMaxConeInputs);

}  // namespace scmap
