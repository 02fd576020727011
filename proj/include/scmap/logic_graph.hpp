// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scmap/cell_library.hpp"
#include "scmap/netlist.hpp"

namespace scmap {

/// Evaluates one 64-lane word of a combinational block.
void eval_block_word(const LogicBlock& block, std::span<const std::uint64_t> in,
                     std::span<std::uint64_t> out);

/// A module flattened to bit indices with its combinational nodes in
/// topological order. Registers are cut points: their Q bits act as sources
/// and their D bits as sinks.
class CompiledModule {
 public:
  struct Node {
    bool is_cell = false;
    int source = 0;  // index into Module::blocks or Module::instances
    int cell = -1;   // library cell for instances
    std::vector<int> ins;
    std::vector<int> outs;
  };
  struct Register {
    bool is_cell = false;
    int source = 0;
    int cell = -1;
    std::string name;
    int d = 0;
    int q = 0;
  };

  /// `lib` may be null when the module holds no cell instances.
  static CompiledModule compile(const Module& module, const CellLibrary* lib);

  const Module& module() const noexcept { return *module_; }
  int num_bits() const noexcept { return num_bits_; }
  int bit_index(Signal s) const;
  Signal bit_signal(int bit) const { return bit_signal_[bit]; }
  std::string bit_name(int bit) const { return module_->signal_name(bit_signal_[bit]); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Register> registers() const noexcept { return registers_; }
  std::span<const int> input_bits() const noexcept { return input_bits_; }
  std::span<const int> output_bits() const noexcept { return output_bits_; }

  /// Recomputes every combinational bit. `values` holds `words` lanes per
  /// bit, laid out bit-major.
  void eval(std::span<std::uint64_t> values, std::size_t words) const;

  /// Bits whose value depends on the given sinks (transitive fan-in cone),
  /// returned as source bits (inputs / register outputs) in ascending order.
  std::vector<int> support(int bit) const;

 private:
  const Module* module_ = nullptr;
  const CellLibrary* lib_ = nullptr;
  int num_bits_ = 0;
  std::vector<int> net_offset_;
  std::vector<Signal> bit_signal_;
  std::vector<Node> nodes_;
  std::vector<Register> registers_;
  std::vector<int> input_bits_;
  std::vector<int> output_bits_;
  std::vector<int> driver_;  // node index per bit, -1 for sources
};

}  // namespace scmap
