// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/logic_graph.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "scmap/error.hpp"

namespace scmap {

void eval_block_word(const LogicBlock& block, std::span<const std::uint64_t> in,
                     std::span<std::uint64_t> out) {
  switch (block.kind) {
    case BlockKind::kAnd: out[0] = in[0] & in[1]; return;
    case BlockKind::kOr: out[0] = in[0] | in[1]; return;
    case BlockKind::kXor: out[0] = in[0] ^ in[1]; return;
    case BlockKind::kNot: out[0] = ~in[0]; return;
    case BlockKind::kNand: out[0] = ~(in[0] & in[1]); return;
    case BlockKind::kNor: out[0] = ~(in[0] | in[1]); return;
    case BlockKind::kMux: out[0] = (~in[0] & in[1]) | (in[0] & in[2]); return;
    case BlockKind::kAdd: {
      const std::uint64_t c = in.size() > 2 ? in[2] : 0;
      const std::uint64_t t = in[0] ^ in[1];
      out[0] = t ^ c;
      if (out.size() > 1) out[1] = (in[0] & in[1]) | (t & c);
      return;
    }
    case BlockKind::kTable: {
      const auto& table = *block.table;
      std::fill(out.begin(), out.end(), 0);
      for (int lane = 0; lane < 64; ++lane) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < in.size(); ++i) idx |= ((in[i] >> lane) & 1u) << i;
        const std::uint32_t row = table.row(idx);
        for (std::size_t j = 0; j < out.size(); ++j) {
          out[j] |= static_cast<std::uint64_t>((row >> j) & 1u) << lane;
        }
      }
      return;
    }
    case BlockKind::kDff: out[0] = in[0]; return;
  }
}

int CompiledModule::bit_index(Signal s) const {
  const auto& net = module_->net(s.net);
  if (s.bit < 0 || s.bit >= net.width) {
    throw Error(ErrorKind::kValidation, "bit out of range on net " + net.name);
  }
  return net_offset_[s.net - module_->nets.front().id] + s.bit;
}

CompiledModule CompiledModule::compile(const Module& module, const CellLibrary* lib) {
  CompiledModule cm;
  cm.module_ = &module;
  cm.lib_ = lib;
  for (const auto& n : module.nets) {
    cm.net_offset_.push_back(cm.num_bits_);
    for (int b = 0; b < n.width; ++b) cm.bit_signal_.push_back({n.id, b});
    cm.num_bits_ += n.width;
  }
  for (const auto& n : module.nets) {
    for (int b = 0; b < n.width; ++b) {
      if (n.dir == PortDir::kInput) cm.input_bits_.push_back(cm.bit_index({n.id, b}));
      if (n.dir == PortDir::kOutput) cm.output_bits_.push_back(cm.bit_index({n.id, b}));
    }
  }

  std::vector<Node> pending;
  for (std::size_t i = 0; i < module.blocks.size(); ++i) {
    const auto& b = module.blocks[i];
    if (b.is_sequential()) {
      cm.registers_.push_back({false, static_cast<int>(i), -1, b.name,
                               cm.bit_index(b.inputs[0]), cm.bit_index(b.outputs[0])});
      continue;
    }
    Node node{false, static_cast<int>(i), -1, {}, {}};
    for (auto s : b.inputs) node.ins.push_back(cm.bit_index(s));
    for (auto s : b.outputs) node.outs.push_back(cm.bit_index(s));
    pending.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < module.instances.size(); ++i) {
    const auto& inst = module.instances[i];
    if (!lib) throw Error(ErrorKind::kValidation, "instance " + inst.name + " needs a cell library");
    auto idx = lib->find(inst.cell);
    if (!idx) {
      throw Error(ErrorKind::kValidation,
                  "instance " + inst.name + " uses cell " + inst.cell + " missing from library " +
                      lib->name());
    }
    const auto& cell = lib->cell(*idx);
    std::map<std::string, Signal> pins;
    for (const auto& [pin, sig] : inst.pins) {
      if (!pins.emplace(pin, sig).second) {
        throw Error(ErrorKind::kValidation, "instance " + inst.name + " connects pin " + pin + " twice");
      }
    }
    auto pin_bit = [&](const std::string& pin) {
      auto it = pins.find(pin);
      if (it == pins.end()) {
        throw Error(ErrorKind::kValidation, "instance " + inst.name + " leaves pin " + pin + " open");
      }
      return cm.bit_index(it->second);
    };
    if (pins.size() != cell.inputs.size() + 1) {
      throw Error(ErrorKind::kValidation,
                  "instance " + inst.name + " pin list does not match cell " + cell.name);
    }
    if (cell.is_sequential) {
      cm.registers_.push_back({true, static_cast<int>(i), *idx, inst.name, pin_bit(cell.inputs[0]),
                               pin_bit(cell.output)});
      continue;
    }
    Node node{true, static_cast<int>(i), *idx, {}, {}};
    for (const auto& p : cell.inputs) node.ins.push_back(pin_bit(p));
    node.outs.push_back(pin_bit(cell.output));
    pending.push_back(std::move(node));
  }

  // Driver table and topological order.
  cm.driver_.assign(cm.num_bits_, -1);
  std::vector<char> is_source(cm.num_bits_, 0);
  for (int b : cm.input_bits_) is_source[b] = 1;
  for (const auto& r : cm.registers_) {
    if (is_source[r.q]) throw Error(ErrorKind::kValidation, "register " + r.name + " drives a driven bit");
    is_source[r.q] = 1;
  }
  for (std::size_t k = 0; k < pending.size(); ++k) {
    for (int o : pending[k].outs) {
      if (is_source[o] || cm.driver_[o] >= 0) {
        throw Error(ErrorKind::kValidation, "bit " + cm.bit_name(o) + " has more than one driver");
      }
      cm.driver_[o] = static_cast<int>(k);
    }
  }
  std::vector<int> indeg(pending.size(), 0);
  std::vector<std::vector<int>> fanout(pending.size());
  for (std::size_t k = 0; k < pending.size(); ++k) {
    for (int in : pending[k].ins) {
      if (cm.driver_[in] >= 0) {
        ++indeg[k];
        fanout[cm.driver_[in]].push_back(static_cast<int>(k));
      }
    }
  }
  std::deque<int> ready;
  for (std::size_t k = 0; k < pending.size(); ++k) {
    if (indeg[k] == 0) ready.push_back(static_cast<int>(k));
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int k = ready.front();
    ready.pop_front();
    order.push_back(k);
    for (int f : fanout[k]) {
      if (--indeg[f] == 0) ready.push_back(f);
    }
  }
  if (order.size() != pending.size()) {
    throw Error(ErrorKind::kValidation, "combinational cycle in module " + module.name);
  }
  std::vector<int> new_index(pending.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    new_index[order[i]] = static_cast<int>(i);
    cm.nodes_.push_back(std::move(pending[order[i]]));
  }
  for (auto& d : cm.driver_) {
    if (d >= 0) d = new_index[d];
  }
  return cm;
}

void CompiledModule::eval(std::span<std::uint64_t> values, std::size_t words) const {
  std::uint64_t in[kMaxTableInputs];
  std::uint64_t out[32];
  for (const auto& node : nodes_) {
    const std::size_t ni = node.ins.size();
    const std::size_t no = node.outs.size();
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t i = 0; i < ni; ++i) in[i] = values[node.ins[i] * words + w];
      if (node.is_cell) {
        out[0] = lib_->cell(node.cell).expr.eval({in, ni});
      } else {
        eval_block_word(module_->blocks[node.source], {in, ni}, {out, no});
      }
      for (std::size_t j = 0; j < no; ++j) values[node.outs[j] * words + w] = out[j];
    }
  }
}

std::vector<int> CompiledModule::support(int bit) const {
  std::vector<char> seen(num_bits_, 0);
  std::vector<int> stack{bit};
  std::vector<int> leaves;
  while (!stack.empty()) {
    int b = stack.back();
    stack.pop_back();
    if (seen[b]) continue;
    seen[b] = 1;
    if (driver_[b] < 0) {
      leaves.push_back(b);
      continue;
    }
    for (int in : nodes_[driver_[b]].ins) stack.push_back(in);
  }
  std::sort(leaves.begin(), leaves.end());
  return leaves;
}

}  // namespace scmap
