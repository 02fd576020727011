// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/combination.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "scmap/error.hpp"

namespace scmap {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return h;
}

// Pins whose swap leaves the table unchanged share a class.
std::vector<int> symmetry_classes(const TruthTable& t) {
  const int n = t.num_inputs();
  std::vector<int> cls(n);
  std::iota(cls.begin(), cls.end(), 0);
  for (int i = 0; i < n; ++i) {
    if (cls[i] != i) continue;
    for (int j = i + 1; j < n; ++j) {
      if (cls[j] != j) continue;
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::swap(perm[i], perm[j]);
      if (t.permute_inputs(perm) == t) cls[j] = i;
    }
  }
  return cls;
}

}  // namespace

TruthTable evaluate(const CandidateCombination& comb, const CellLibrary& lib) {
  const int n = comb.num_inputs;
  const std::size_t words = words_for_inputs(n);
  const std::size_t total = static_cast<std::size_t>(n) + comb.nodes.size();
  std::vector<std::uint64_t> v(total * words);
  for (int i = 0; i < n; ++i) {
    auto col = input_column(n, i);
    std::copy(col.begin(), col.end(), v.begin() + static_cast<std::ptrdiff_t>(i * words));
  }
  std::vector<std::uint64_t> in;
  for (std::size_t k = 0; k < comb.nodes.size(); ++k) {
    const auto& node = comb.nodes[k];
    const auto& expr = lib.cell(node.cell).expr;
    in.resize(node.fanin.size());
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t p = 0; p < node.fanin.size(); ++p) in[p] = v[node.fanin[p] * words + w];
      v[(n + k) * words + w] = expr.eval(in);
    }
  }
  const std::uint64_t mask = row_mask(n);
  std::vector<std::vector<std::uint64_t>> outs;
  for (int s : comb.outputs) {
    std::vector<std::uint64_t> col(v.begin() + static_cast<std::ptrdiff_t>(s * words),
                                   v.begin() + static_cast<std::ptrdiff_t>((s + 1) * words));
    col.back() &= mask;
    outs.push_back(std::move(col));
  }
  return TruthTable::from_output_bits(n, outs);
}

double total_area(const CandidateCombination& comb, const CellLibrary& lib) {
  double a = 0.0;
  for (const auto& node : comb.nodes) a += lib.cell(node.cell).area;
  return a;
}

double total_cap(const CandidateCombination& comb, const CellLibrary& lib) {
  double c = 0.0;
  for (const auto& node : comb.nodes) c += lib.cell(node.cell).cap;
  return c;
}

bool well_formed(const CandidateCombination& comb, const CellLibrary& lib) {
  for (std::size_t k = 0; k < comb.nodes.size(); ++k) {
    const auto& node = comb.nodes[k];
    if (node.cell < 0 || node.cell >= lib.size()) return false;
    const auto& cell = lib.cell(node.cell);
    if (cell.is_sequential || cell.inputs.size() != node.fanin.size()) return false;
    for (int f : node.fanin) {
      if (f < 0 || f >= comb.num_inputs + static_cast<int>(k)) return false;
    }
  }
  std::vector<int> outs = comb.outputs;
  std::sort(outs.begin(), outs.end());
  if (std::adjacent_find(outs.begin(), outs.end()) != outs.end()) return false;
  for (int s : outs) {
    if (!comb.is_node(s) || comb.node_of(s) >= comb.size()) return false;
  }
  return true;
}

void prune(CandidateCombination& comb) {
  const int n = comb.num_inputs;
  std::vector<char> live(comb.nodes.size(), 0);
  for (int s : comb.outputs) {
    if (comb.is_node(s)) live[comb.node_of(s)] = 1;
  }
  for (int k = comb.size() - 1; k >= 0; --k) {
    if (!live[k]) continue;
    for (int f : comb.nodes[k].fanin) {
      if (comb.is_node(f)) live[comb.node_of(f)] = 1;
    }
  }
  std::vector<int> remap(n + comb.nodes.size(), -1);
  for (int i = 0; i < n; ++i) remap[i] = i;
  std::vector<CombNode> kept;
  for (int k = 0; k < comb.size(); ++k) {
    if (!live[k]) continue;
    CombNode node = comb.nodes[k];
    for (int& f : node.fanin) f = remap[f];
    remap[n + k] = n + static_cast<int>(kept.size());
    kept.push_back(std::move(node));
  }
  for (int& s : comb.outputs) s = remap[s];
  comb.nodes = std::move(kept);
}

std::uint64_t structural_hash(const CandidateCombination& comb, const CellLibrary& lib, bool by_name) {
  const int n = comb.num_inputs;
  std::map<int, std::pair<std::uint64_t, std::vector<int>>> cell_info;
  std::vector<std::uint64_t> label(n + comb.nodes.size());
  for (int i = 0; i < n; ++i) label[i] = mix(0x1234, static_cast<std::uint64_t>(i));
  for (int k = 0; k < comb.size(); ++k) {
    const auto& node = comb.nodes[k];
    auto it = cell_info.find(node.cell);
    if (it == cell_info.end()) {
      const auto& t = lib.table(node.cell);
      std::uint64_t tag = by_name ? hash_string(lib.cell(node.cell).name) : hash_string(t.to_string());
      it = cell_info.emplace(node.cell, std::make_pair(tag, symmetry_classes(t))).first;
    }
    const auto& [tag, cls] = it->second;
    // Sort fanin labels within each symmetric pin class.
    std::vector<std::pair<int, std::uint64_t>> pins;
    for (std::size_t p = 0; p < node.fanin.size(); ++p) pins.push_back({cls[p], label[node.fanin[p]]});
    std::sort(pins.begin(), pins.end());
    std::uint64_t h = mix(tag, node.fanin.size());
    for (auto& [c, l] : pins) h = mix(mix(h, static_cast<std::uint64_t>(c)), l);
    label[n + k] = h;
  }
  std::vector<std::uint64_t> node_labels(label.begin() + n, label.end());
  std::sort(node_labels.begin(), node_labels.end());
  std::uint64_t h = mix(0xabcdef, static_cast<std::uint64_t>(n));
  for (auto l : node_labels) h = mix(h, l);
  for (int s : comb.outputs) h = mix(h, label[s]);
  return h;
}

std::string describe(const CandidateCombination& comb, const CellLibrary& lib) {
  std::ostringstream os;
  auto sig = [&](int s) { return comb.is_node(s) ? "n" + std::to_string(comb.node_of(s)) : "i" + std::to_string(s); };
  for (int k = 0; k < comb.size(); ++k) {
    os << (k ? " " : "") << 'n' << k << '=' << lib.cell(comb.nodes[k].cell).name << '(';
    for (std::size_t p = 0; p < comb.nodes[k].fanin.size(); ++p) os << (p ? "," : "") << sig(comb.nodes[k].fanin[p]);
    os << ')';
  }
  os << " ->";
  for (int s : comb.outputs) os << ' ' << sig(s);
  return os.str();
}

TruthTable evaluate(const PrimitiveDag& dag) {
  const int n = dag.num_inputs;
  const std::size_t words = words_for_inputs(n);
  std::vector<std::vector<std::uint64_t>> v;
  for (int i = 0; i < n; ++i) v.push_back(input_column(n, i));
  for (const auto& node : dag.nodes) {
    std::vector<std::uint64_t> out(words);
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t a = v[node.fanin[0]][w];
      const std::uint64_t b = node.fanin.size() > 1 ? v[node.fanin[1]][w] : 0;
      switch (node.op) {
        case PrimOp::kAnd: out[w] = a & b; break;
        case PrimOp::kOr: out[w] = a | b; break;
        case PrimOp::kNot: out[w] = ~a; break;
        case PrimOp::kNand: out[w] = ~(a & b); break;
        case PrimOp::kNor: out[w] = ~(a | b); break;
        case PrimOp::kXor: out[w] = a ^ b; break;
      }
    }
    out.back() &= row_mask(n);
    v.push_back(std::move(out));
  }
  std::vector<std::vector<std::uint64_t>> outs;
  for (int s : dag.outputs) outs.push_back(v[s]);
  return TruthTable::from_output_bits(n, outs);
}

}  // namespace scmap
