// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/equivalence.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "scmap/error.hpp"
#include "scmap/logic_graph.hpp"

namespace scmap {

std::optional<std::size_t> first_mismatch(const TruthTable& f, const TruthTable& g) {
  if (f.num_inputs() != g.num_inputs() || f.num_outputs() != g.num_outputs()) {
    throw Error(ErrorKind::kValidation, "truth tables differ in shape");
  }
  for (std::size_t r = 0; r < f.num_rows(); ++r) {
    if (f.row(r) != g.row(r)) return r;
  }
  return std::nullopt;
}

bool equivalent_exhaustive(const TruthTable& f, const TruthTable& g) { return !first_mismatch(f, g); }

namespace {

struct CellShape {
  std::string label;
  std::vector<int> cls;  // symmetric pin class per pin
};

CellShape shape_of(const CellLibrary& lib, int cell) {
  const auto& t = lib.table(cell);
  const int n = t.num_inputs();
  CellShape s{std::to_string(n) + ":" + t.to_string(), std::vector<int>(n)};
  std::iota(s.cls.begin(), s.cls.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (s.cls[j] != j) continue;
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::swap(perm[i], perm[j]);
      if (t.permute_inputs(perm) == t) s.cls[j] = s.cls[i];
    }
  }
  return s;
}

class IsoMatcher {
 public:
  IsoMatcher(const CandidateCombination& a, const CandidateCombination& b, const CellLibrary& lib)
      : a_(a), b_(b), lib_(lib), fwd_(a.num_inputs + a.nodes.size(), -1), rev_(b.num_inputs + b.nodes.size(), -1) {}

  bool run() {
    for (std::size_t j = 0; j < a_.outputs.size(); ++j) {
      if (!unify(a_.outputs[j], b_.outputs[j])) return false;
    }
    return std::all_of(fwd_.begin() + a_.num_inputs, fwd_.end(), [](int v) { return v >= 0; });
  }

 private:
  const CellShape& shape(int cell) {
    auto it = shapes_.find(cell);
    if (it == shapes_.end()) it = shapes_.emplace(cell, shape_of(lib_, cell)).first;
    return it->second;
  }

  bool unify(int x, int y) {
    if (x < a_.num_inputs || y < b_.num_inputs) return x == y;
    if (fwd_[x] >= 0 || rev_[y] >= 0) return fwd_[x] == y && rev_[y] == x;
    const auto& na = a_.nodes[x - a_.num_inputs];
    const auto& nb = b_.nodes[y - b_.num_inputs];
    const auto& sa = shape(na.cell);
    if (sa.label != shape(nb.cell).label) return false;
    fwd_[x] = y;
    rev_[y] = x;
    // Try fanin pairings that permute pins within symmetric classes.
    const int k = static_cast<int>(na.fanin.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    auto sorted_key = [&](const std::vector<int>& o) {
      for (int p = 0; p < k; ++p) {
        if (sa.cls[o[p]] != sa.cls[p]) return false;
      }
      return true;
    };
    do {
      if (!sorted_key(order)) continue;
      auto saved_f = fwd_;
      auto saved_r = rev_;
      bool ok = true;
      for (int p = 0; p < k && ok; ++p) ok = unify(na.fanin[p], nb.fanin[order[p]]);
      if (ok) return true;
      fwd_ = std::move(saved_f);
      rev_ = std::move(saved_r);
    } while (std::next_permutation(order.begin(), order.end()));
    fwd_[x] = -1;
    rev_[y] = -1;
    return false;
  }

  const CandidateCombination& a_;
  const CandidateCombination& b_;
  const CellLibrary& lib_;
  std::vector<int> fwd_;
  std::vector<int> rev_;
  std::map<int, CellShape> shapes_;
};

}  // namespace

bool isomorphic(const CandidateCombination& a, const CandidateCombination& b, const CellLibrary& lib) {
  if (a.num_inputs != b.num_inputs || a.nodes.size() != b.nodes.size() || a.outputs.size() != b.outputs.size()) {
    return false;
  }
  if (structural_hash(a, lib, false) != structural_hash(b, lib, false)) return false;
  return IsoMatcher(a, b, lib).run();
}

std::string EquivalenceReport::summary() const {
  std::ostringstream os;
  int pass = 0;
  for (const auto& c : cones) pass += c.equivalent;
  os << "equivalence: " << (overall ? "PASS" : "FAIL") << " (" << pass << "/" << cones.size() << " cones)\n";
  for (const auto& c : cones) {
    if (c.equivalent) continue;
    os << "  " << c.id << ": " << (c.unverifiable ? "unverifiable" : "mismatch");
    if (c.counterexample) os << " at " << *c.counterexample;
    os << '\n';
  }
  return os.str();
}

namespace {

// Source and sink naming shared by both sides of the comparison.
struct SideView {
  const CompiledModule* cm;
  std::map<std::string, int> sources;  // name -> bit
  std::map<std::string, int> sinks;
};

SideView view_of(const CompiledModule& cm) {
  SideView v{&cm, {}, {}};
  for (int b : cm.input_bits()) v.sources["port:" + cm.bit_name(b)] = b;
  for (int b : cm.output_bits()) v.sinks["port:" + cm.bit_name(b)] = b;
  for (const auto& r : cm.registers()) {
    v.sources["reg:" + r.name] = r.q;
    v.sinks["reg:" + r.name] = r.d;
  }
  return v;
}

std::vector<std::uint64_t> eval_cone(const SideView& v, const std::vector<std::string>& inputs, int sink) {
  const int n = static_cast<int>(inputs.size());
  const std::size_t words = words_for_inputs(n);
  std::vector<std::uint64_t> values(static_cast<std::size_t>(v.cm->num_bits()) * words, 0);
  for (int i = 0; i < n; ++i) {
    auto it = v.sources.find(inputs[i]);
    if (it == v.sources.end()) continue;
    auto col = input_column(n, i);
    std::copy(col.begin(), col.end(), values.begin() + static_cast<std::ptrdiff_t>(it->second * words));
  }
  v.cm->eval(values, words);
  std::vector<std::uint64_t> out(values.begin() + static_cast<std::ptrdiff_t>(sink * words),
                                 values.begin() + static_cast<std::ptrdiff_t>((sink + 1) * words));
  out.back() &= row_mask(n);
  return out;
}

}  // namespace

EquivalenceReport verify_design(const Design& original, const Design& mapped, const CellLibrary& lib) {
  EquivalenceReport report;
  report.overall = true;
  for (const auto& om : original.modules) {
    const Module* mm = mapped.find_module(om.name);
    if (!mm) throw Error(ErrorKind::kValidation, "mapped design lacks module " + om.name);
    for (const auto& n : om.nets) {
      if (n.dir == PortDir::kInternal) continue;
      auto id = mm->find_net(n.name);
      if (!id || mm->net(*id).width != n.width || mm->net(*id).dir != n.dir) {
        throw Error(ErrorKind::kValidation, "port mismatch on " + om.name + "." + n.name);
      }
    }
    for (const auto& n : mm->nets) {
      if (n.dir != PortDir::kInternal && !om.find_net(n.name)) {
        throw Error(ErrorKind::kValidation, "port mismatch: extra port " + om.name + "." + n.name);
      }
    }
    const auto oc = CompiledModule::compile(om, &lib);
    const auto mc = CompiledModule::compile(*mm, &lib);
    const auto ov = view_of(oc);
    const auto mv = view_of(mc);
    for (const auto& [name, bit] : ov.sinks) {
      if (!mv.sinks.count(name)) throw Error(ErrorKind::kValidation, "mapped design lacks " + name);
    }
    for (const auto& [name, bit] : mv.sinks) {
      if (!ov.sinks.count(name)) throw Error(ErrorKind::kValidation, "mapped design has unmatched " + name);
    }
    auto names_of = [](const SideView& v, const CompiledModule& cm, int sink) {
      std::map<int, std::string> by_bit;
      for (const auto& [name, b] : v.sources) by_bit[b] = name;
      std::set<std::string> out;
      for (int b : cm.support(sink)) {
        auto it = by_bit.find(b);
        out.insert(it != by_bit.end() ? it->second : "floating:" + cm.bit_name(b));
      }
      return out;
    };
    for (const auto& [name, obit] : ov.sinks) {
      const int mbit = mv.sinks.at(name);
      auto support = names_of(ov, oc, obit);
      auto ms = names_of(mv, mc, mbit);
      support.insert(ms.begin(), ms.end());
      ConeVerdict cv;
      cv.id = (om.name == original.top ? "" : om.name + ".") + name;
      cv.inputs.assign(support.begin(), support.end());
      if (cv.inputs.size() > static_cast<std::size_t>(kMaxTableInputs)) {
        cv.unverifiable = true;
        report.overall = false;
        report.cones.push_back(std::move(cv));
        continue;
      }
      const auto fo = eval_cone(ov, cv.inputs, obit);
      const auto fm = eval_cone(mv, cv.inputs, mbit);
      cv.equivalent = true;
      for (std::size_t w = 0; w < fo.size() && cv.equivalent; ++w) {
        if (fo[w] == fm[w]) continue;
        const int bit = std::countr_zero(fo[w] ^ fm[w]);
        const std::size_t row = w * 64 + static_cast<std::size_t>(bit);
        std::string cex;
        for (std::size_t i = 0; i < cv.inputs.size(); ++i) {
          cex += (i ? "," : "") + cv.inputs[i] + "=" + std::to_string(row >> i & 1);
        }
        cv.equivalent = false;
        cv.counterexample = cex;
      }
      report.overall = report.overall && cv.equivalent;
      report.cones.push_back(std::move(cv));
    }
  }
  return report;
}

}  // namespace scmap
