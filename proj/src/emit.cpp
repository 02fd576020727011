// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/emit.hpp"

#include <set>
#include <sstream>

#include "scmap/error.hpp"

namespace scmap {

namespace {

std::string net_stem(const std::string& block_name) {
  std::string s;
  for (char c : block_name) {
    if (c == '[') s += '_';
    else if (c != ']') s += c;
  }
  return s;
}

}  // namespace

std::string emit_netlist(const Design& design, const MappingSolution& solution, const CellLibrary& lib) {
  std::ostringstream os;
  for (const auto& m : design.modules) {
    if (!m.instances.empty()) throw Error(ErrorKind::kValidation, "module " + m.name + " is already mapped");
    std::set<std::string> names;
    for (const auto& n : m.nets) names.insert(n.name);
    std::ostringstream wires;
    std::ostringstream insts;
    for (const auto& b : m.blocks) {
      if (b.is_sequential()) {
        const auto& ff = lib.cell(lib.default_flop());
        insts << "  inst " << ff.name << ' ' << b.name << ' ' << ff.inputs[0] << '=' << m.signal_name(b.inputs[0])
              << ' ' << ff.output << '=' << m.signal_name(b.outputs[0]) << '\n';
        continue;
      }
      auto it = solution.assignment.find(b.id);
      if (it == solution.assignment.end()) throw Error(ErrorKind::kValidation, "block " + b.name + " has no mapping");
      const auto& comb = it->second.comb;
      if (!well_formed(comb, lib) || comb.num_inputs != static_cast<int>(b.inputs.size()) ||
          comb.outputs.size() != b.outputs.size()) {
        throw Error(ErrorKind::kValidation, "mapping of block " + b.name + " has dangling or mismatched wiring");
      }
      std::vector<std::string> sig(comb.num_inputs + comb.nodes.size());
      for (int i = 0; i < comb.num_inputs; ++i) sig[i] = m.signal_name(b.inputs[i]);
      for (std::size_t j = 0; j < comb.outputs.size(); ++j) sig[comb.outputs[j]] = m.signal_name(b.outputs[j]);
      const std::string stem = net_stem(b.name);
      for (int k = 0; k < comb.size(); ++k) {
        auto& s = sig[comb.num_inputs + k];
        if (!s.empty()) continue;
        std::string name = stem + "/n" + std::to_string(k);
        while (names.count(name)) name += "_";
        names.insert(name);
        wires << "  wire 1 internal " << name << '\n';
        s = name;
      }
      for (int k = 0; k < comb.size(); ++k) {
        const auto& node = comb.nodes[k];
        const auto& cell = lib.cell(node.cell);
        insts << "  inst " << cell.name << ' ' << b.name << '/' << k;
        for (std::size_t p = 0; p < node.fanin.size(); ++p) insts << ' ' << cell.inputs[p] << '=' << sig[node.fanin[p]];
        insts << ' ' << cell.output << '=' << sig[comb.num_inputs + k] << '\n';
      }
    }
    os << "module " << m.name << '\n';
    for (const auto& n : m.nets) {
      const char* dir = n.dir == PortDir::kInput ? "input" : n.dir == PortDir::kOutput ? "output" : "internal";
      os << "  wire " << n.width << ' ' << dir << ' ' << n.name << '\n';
    }
    os << wires.str() << insts.str() << "end\n";
  }
  return os.str();
}

Design emit_design(const Design& design, const MappingSolution& solution, const CellLibrary& lib) {
  return parse_netlist(emit_netlist(design, solution, lib));
}

}  // namespace scmap
