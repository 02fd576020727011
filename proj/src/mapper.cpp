// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/mapper.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <tuple>

#include "scmap/error.hpp"

namespace scmap {

void SAConfig::validate() const {
  if (!(initial_temp > 0.0) || !std::isfinite(initial_temp)) throw Error(ErrorKind::kValidation, "sa.initial_temp must be > 0");
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw Error(ErrorKind::kValidation, "sa.cooling_rate must lie in (0,1)");
  if (iterations < 0) throw Error(ErrorKind::kValidation, "sa.iterations must be >= 0");
  if (max_cells < 1) throw Error(ErrorKind::kValidation, "sa.max_cells must be >= 1");
  if (keep_top_k < 1) throw Error(ErrorKind::kValidation, "sa.keep_top_k must be >= 1");
  if (!(w_area >= 0.0) || !(w_power >= 0.0) || !std::isfinite(w_area) || !std::isfinite(w_power)) {
    throw Error(ErrorKind::kValidation, "sa weights must be finite and >= 0");
  }
}

std::vector<CandidateCombination> find_direct(const TruthTable& table, const CellLibrary& lib) {
  std::vector<CandidateCombination> out;
  if (table.num_outputs() != 1 || table.num_inputs() > lib.max_arity()) return out;
  const int n = table.num_inputs();
  for (const auto& m : lib.match(table)) {
    CandidateCombination c;
    c.num_inputs = n;
    CombNode node{m.cell, std::vector<int>(n)};
    for (int i = 0; i < n; ++i) node.fanin[m.perm[i]] = i;
    c.nodes.push_back(std::move(node));
    c.outputs = {n};
    c.table = table;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Primitive network construction

class DagBuilder {
 public:
  explicit DagBuilder(int num_inputs) { dag_.num_inputs = num_inputs; }

  int add(PrimOp op, int a, int b = -1) {
    if (op == PrimOp::kNot && is_not(a)) return node(a).fanin[0];
    if (b >= 0 && op != PrimOp::kNot && a > b) std::swap(a, b);
    auto key = std::make_tuple(op, a, b);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    int s = fresh(op, a, b);
    cache_[key] = s;
    return s;
  }

  int fresh(PrimOp op, int a, int b = -1) {
    PrimNode n{op, {a}};
    if (b >= 0) n.fanin.push_back(b);
    dag_.nodes.push_back(std::move(n));
    return dag_.num_inputs + dag_.size() - 1;
  }

  // Outputs must be distinct nodes.
  void add_output(int s) {
    if (s < dag_.num_inputs || used_.count(s)) s = fresh(PrimOp::kNot, fresh(PrimOp::kNot, s));
    used_.insert(s);
    dag_.outputs.push_back(s);
  }

  bool is_not(int s) const { return s >= dag_.num_inputs && node(s).op == PrimOp::kNot; }
  const PrimNode& node(int s) const { return dag_.nodes[s - dag_.num_inputs]; }
  PrimitiveDag take() { return std::move(dag_); }

 private:
  PrimitiveDag dag_;
  std::map<std::tuple<PrimOp, int, int>, int> cache_;
  std::set<int> used_;
};

struct Implicant {
  std::uint32_t value;
  std::uint32_t mask;  // set bits are don't-care
  auto operator<=>(const Implicant&) const = default;
  bool covers(std::uint32_t m) const { return (m & ~mask) == value; }
};

std::vector<Implicant> prime_implicants(const std::vector<std::uint32_t>& minterms) {
  std::set<Implicant> current;
  for (auto m : minterms) current.insert({m, 0});
  std::set<Implicant> primes;
  while (!current.empty()) {
    std::map<std::uint32_t, std::vector<Implicant>> by_mask;
    for (const auto& imp : current) by_mask[imp.mask].push_back(imp);
    std::set<Implicant> next;
    std::set<Implicant> merged;
    for (auto& [mask, group] : by_mask) {
      std::set<std::uint32_t> values;
      for (const auto& g : group) values.insert(g.value);
      for (const auto& g : group) {
        for (std::uint32_t rest = ~(g.value | mask) & 0xFFFF; rest; rest &= rest - 1) {
          std::uint32_t bit = rest & (~rest + 1);
          if (values.count(g.value | bit)) {
            next.insert({g.value, mask | bit});
            merged.insert(g);
            merged.insert({g.value | bit, mask});
          }
        }
      }
    }
    for (const auto& imp : current) {
      if (!merged.count(imp)) primes.insert(imp);
    }
    current = std::move(next);
  }
  return {primes.begin(), primes.end()};
}

std::vector<Implicant> select_cover(const std::vector<std::uint32_t>& minterms, const std::vector<Implicant>& primes) {
  std::vector<Implicant> chosen;
  std::set<std::uint32_t> uncovered(minterms.begin(), minterms.end());
  std::vector<char> taken(primes.size(), 0);
  // Essential primes.
  for (auto m : minterms) {
    int only = -1;
    int count = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      if (primes[p].covers(m)) {
        ++count;
        only = static_cast<int>(p);
      }
    }
    if (count == 1 && !taken[only]) {
      taken[only] = 1;
      chosen.push_back(primes[only]);
    }
  }
  for (const auto& c : chosen) {
    for (auto it = uncovered.begin(); it != uncovered.end();) it = c.covers(*it) ? uncovered.erase(it) : std::next(it);
  }
  while (!uncovered.empty()) {
    int best = -1;
    int best_gain = 0;
    int best_lits = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      if (taken[p]) continue;
      int gain = 0;
      for (auto m : uncovered) gain += primes[p].covers(m);
      int lits = -std::popcount(primes[p].mask);
      if (gain > best_gain || (gain == best_gain && gain > 0 && lits < best_lits)) {
        best = static_cast<int>(p);
        best_gain = gain;
        best_lits = lits;
      }
    }
    taken[best] = 1;
    chosen.push_back(primes[best]);
    for (auto it = uncovered.begin(); it != uncovered.end();) it = primes[best].covers(*it) ? uncovered.erase(it) : std::next(it);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

int balanced(DagBuilder& b, PrimOp op, std::vector<int> terms) {
  while (terms.size() > 1) {
    std::vector<int> next;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) next.push_back(b.add(op, terms[i], terms[i + 1]));
    if (terms.size() % 2) next.push_back(terms.back());
    terms = std::move(next);
  }
  return terms[0];
}

}  // namespace

PrimitiveDag decompose(const TruthTable& table) {
  const int n = table.num_inputs();
  if (n < 1) throw Error(ErrorKind::kValidation, "cannot decompose a function without inputs");
  if (n > kMaxTableInputs) throw Error(ErrorKind::kValidation, "decompose supports at most 16 inputs");
  DagBuilder b(n);
  for (int j = 0; j < table.num_outputs(); ++j) {
    std::vector<std::uint32_t> minterms;
    for (std::size_t r = 0; r < table.num_rows(); ++r) {
      if (table.bit(r, j)) minterms.push_back(static_cast<std::uint32_t>(r));
    }
    int root;
    if (minterms.empty()) {
      root = b.add(PrimOp::kAnd, 0, b.add(PrimOp::kNot, 0));
    } else if (minterms.size() == table.num_rows()) {
      root = b.add(PrimOp::kOr, 0, b.add(PrimOp::kNot, 0));
    } else {
      std::vector<int> products;
      for (const auto& imp : select_cover(minterms, prime_implicants(minterms))) {
        int acc = -1;
        for (int i = 0; i < n; ++i) {
          if (imp.mask >> i & 1) continue;
          int lit = (imp.value >> i & 1) ? i : b.add(PrimOp::kNot, i);
          acc = acc < 0 ? lit : b.add(PrimOp::kAnd, acc, lit);
        }
        products.push_back(acc);
      }
      root = balanced(b, PrimOp::kOr, products);
    }
    b.add_output(root);
  }
  return b.take();
}

namespace {

// ---------------------------------------------------------------------------
// Cover styles

enum class Style { kSop, kNand, kNor, kXor, kXorNand };

struct Literal {
  int base;
  bool neg;
};

PrimitiveDag restyle(const PrimitiveDag& dag, Style style) {
  DagBuilder b(dag.num_inputs);
  const int n = dag.num_inputs;
  std::vector<int> map(n + dag.nodes.size());
  for (int i = 0; i < n; ++i) map[i] = i;
  auto lit = [&](int s) -> Literal {
    if (s >= n && dag.nodes[s - n].op == PrimOp::kNot) return {dag.nodes[s - n].fanin[0], true};
    return {s, false};
  };
  auto and_ = [&](int x, int y) {
    switch (style) {
      case Style::kNand:
      case Style::kXorNand: return b.add(PrimOp::kNot, b.add(PrimOp::kNand, x, y));
      case Style::kNor: return b.add(PrimOp::kNor, b.add(PrimOp::kNot, x), b.add(PrimOp::kNot, y));
      default: return b.add(PrimOp::kAnd, x, y);
    }
  };
  auto or_ = [&](int x, int y) {
    switch (style) {
      case Style::kNand:
      case Style::kXorNand: return b.add(PrimOp::kNand, b.add(PrimOp::kNot, x), b.add(PrimOp::kNot, y));
      case Style::kNor: return b.add(PrimOp::kNot, b.add(PrimOp::kNor, x, y));
      default: return b.add(PrimOp::kOr, x, y);
    }
  };
  auto xor_ = [&](int x, int y) {
    if (style == Style::kXorNand) {
      int t = b.add(PrimOp::kNand, x, y);
      return b.add(PrimOp::kNand, b.add(PrimOp::kNand, x, t), b.add(PrimOp::kNand, y, t));
    }
    return b.add(PrimOp::kXor, x, y);
  };
  for (int k = 0; k < dag.size(); ++k) {
    const auto& node = dag.nodes[k];
    int s = 0;
    auto f = [&](int p) { return map[node.fanin[p]]; };
    bool rewritten = false;
    if ((style == Style::kXor || style == Style::kXorNand) && node.op == PrimOp::kOr) {
      const int p = node.fanin[0];
      const int q = node.fanin[1];
      if (p >= n && q >= n && dag.nodes[p - n].op == PrimOp::kAnd && dag.nodes[q - n].op == PrimOp::kAnd) {
        Literal a0 = lit(dag.nodes[p - n].fanin[0]), a1 = lit(dag.nodes[p - n].fanin[1]);
        Literal c0 = lit(dag.nodes[q - n].fanin[0]), c1 = lit(dag.nodes[q - n].fanin[1]);
        if (c0.base != a0.base) std::swap(c0, c1);
        if (a0.base != a1.base && c0.base == a0.base && c1.base == a1.base && c0.neg != a0.neg && c1.neg != a1.neg) {
          s = xor_(map[a0.base], map[a1.base]);
          if (a0.neg == a1.neg) s = b.add(PrimOp::kNot, s);
          rewritten = true;
        }
      }
    }
    if (!rewritten) {
      switch (node.op) {
        case PrimOp::kAnd: s = and_(f(0), f(1)); break;
        case PrimOp::kOr: s = or_(f(0), f(1)); break;
        case PrimOp::kNot: s = b.add(PrimOp::kNot, f(0)); break;
        case PrimOp::kNand: s = b.add(PrimOp::kNot, and_(f(0), f(1))); break;
        case PrimOp::kNor: s = b.add(PrimOp::kNot, or_(f(0), f(1))); break;
        case PrimOp::kXor: s = xor_(f(0), f(1)); break;
      }
    }
    map[n + k] = s;
  }
  for (int o : dag.outputs) b.add_output(map[o]);
  PrimitiveDag out = b.take();
  // Drop nodes orphaned by pattern rewrites.
  std::vector<char> live(out.nodes.size(), 0);
  for (int o : out.outputs) live[o - n] = 1;
  for (int k = out.size() - 1; k >= 0; --k) {
    if (!live[k]) continue;
    for (int f : out.nodes[k].fanin) {
      if (f >= n) live[f - n] = 1;
    }
  }
  std::vector<int> remap(n + out.nodes.size(), -1);
  for (int i = 0; i < n; ++i) remap[i] = i;
  PrimitiveDag pruned;
  pruned.num_inputs = n;
  for (int k = 0; k < out.size(); ++k) {
    if (!live[k]) continue;
    PrimNode node = out.nodes[k];
    for (int& f : node.fanin) f = remap[f];
    remap[n + k] = n + pruned.size();
    pruned.nodes.push_back(std::move(node));
  }
  for (int o : out.outputs) pruned.outputs.push_back(remap[o]);
  return pruned;
}

// ---------------------------------------------------------------------------
// Cut-based covering

using Cut = std::vector<int>;

std::uint64_t eval_op(PrimOp op, std::uint64_t a, std::uint64_t b) {
  switch (op) {
    case PrimOp::kAnd: return a & b;
    case PrimOp::kOr: return a | b;
    case PrimOp::kNot: return ~a;
    case PrimOp::kNand: return ~(a & b);
    case PrimOp::kNor: return ~(a | b);
    case PrimOp::kXor: return a ^ b;
  }
  return 0;
}

class CutMapper {
 public:
  CutMapper(const PrimitiveDag& dag, const CellLibrary& lib, std::vector<char> allowed, bool unit_cost)
      : dag_(dag), lib_(lib), allowed_(std::move(allowed)), unit_cost_(unit_cost) {
    k_ = std::min(4, lib.max_arity());
  }

  std::optional<CandidateCombination> run() {
    const int n = dag_.num_inputs;
    const int total = n + dag_.size();
    std::vector<int> fanout(total, 0);
    for (const auto& node : dag_.nodes) {
      for (int f : node.fanin) ++fanout[f];
    }
    for (int o : dag_.outputs) ++fanout[o];
    std::vector<std::vector<Cut>> cuts(total);
    for (int i = 0; i < n; ++i) cuts[i] = {{i}};
    std::vector<double> cost(total, 0.0);
    struct Choice {
      Cut cut;
      CellLibrary::Match match;
    };
    std::vector<std::optional<Choice>> choice(total);
    for (int k = 0; k < dag_.size(); ++k) {
      const int s = n + k;
      const auto& node = dag_.nodes[k];
      std::set<Cut> set;
      if (node.fanin.size() == 1) {
        for (const auto& c : cuts[node.fanin[0]]) set.insert(c);
      } else {
        for (const auto& c0 : cuts[node.fanin[0]]) {
          for (const auto& c1 : cuts[node.fanin[1]]) {
            Cut m;
            std::set_union(c0.begin(), c0.end(), c1.begin(), c1.end(), std::back_inserter(m));
            if (static_cast<int>(m.size()) <= k_) set.insert(m);
          }
        }
      }
      std::vector<Cut> list(set.begin(), set.end());
      std::stable_sort(list.begin(), list.end(), [](const Cut& a, const Cut& b) { return a.size() < b.size(); });
      if (list.size() > 24) list.resize(24);
      double best = INFINITY;
      for (const auto& c : list) {
        auto m = match(s, c);
        if (!m) continue;
        double v = unit_cost_ ? 1.0 : lib_.cell(m->cell).area;
        for (int leaf : c) v += cost[leaf] / std::max(1, fanout[leaf]);
        if (v < best) {
          best = v;
          choice[s] = Choice{c, *m};
        }
      }
      if (!choice[s]) return std::nullopt;
      cost[s] = best;
      list.push_back({s});
      cuts[s] = std::move(list);
    }
    std::vector<char> required(total, 0);
    for (int o : dag_.outputs) required[o] = 1;
    for (int s = total - 1; s >= n; --s) {
      if (!required[s]) continue;
      for (int leaf : choice[s]->cut) required[leaf] = 1;
    }
    CandidateCombination comb;
    comb.num_inputs = n;
    std::vector<int> mapped(total, -1);
    for (int i = 0; i < n; ++i) mapped[i] = i;
    for (int s = n; s < total; ++s) {
      if (!required[s]) continue;
      const auto& ch = *choice[s];
      CombNode node{ch.match.cell, std::vector<int>(ch.cut.size())};
      for (std::size_t i = 0; i < ch.cut.size(); ++i) node.fanin[ch.match.perm[i]] = mapped[ch.cut[i]];
      mapped[s] = n + comb.size();
      comb.nodes.push_back(std::move(node));
    }
    for (int o : dag_.outputs) comb.outputs.push_back(mapped[o]);
    return comb;
  }

 private:
  std::optional<CellLibrary::Match> match(int root, const Cut& cut) {
    const int k = static_cast<int>(cut.size());
    std::map<int, std::uint64_t> val;
    for (int i = 0; i < k; ++i) val[cut[i]] = input_column(k, i)[0];
    std::function<std::uint64_t(int)> eval = [&](int s) -> std::uint64_t {
      if (auto it = val.find(s); it != val.end()) return it->second;
      const auto& node = dag_.nodes[s - dag_.num_inputs];
      std::uint64_t a = eval(node.fanin[0]);
      std::uint64_t b = node.fanin.size() > 1 ? eval(node.fanin[1]) : 0;
      return val[s] = eval_op(node.op, a, b);
    };
    const std::uint64_t bits = eval(root) & row_mask(k);
    auto key = std::make_pair(k, bits);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::vector<std::uint32_t> rows(std::size_t{1} << k);
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = bits >> r & 1;
    std::optional<CellLibrary::Match> best;
    for (auto& m : lib_.match(TruthTable(k, 1, rows))) {
      if (!allowed_[m.cell]) continue;
      if (!best || lib_.cell(m.cell).area < lib_.cell(best->cell).area) best = m;
    }
    cache_[key] = best;
    return best;
  }

  const PrimitiveDag& dag_;
  const CellLibrary& lib_;
  std::vector<char> allowed_;
  bool unit_cost_;
  int k_;
  std::map<std::pair<int, std::uint64_t>, std::optional<CellLibrary::Match>> cache_;
};

std::vector<char> cells_with(const CellLibrary& lib, std::initializer_list<TruthTable> functions) {
  std::vector<char> allowed(lib.size(), 0);
  for (int i = 0; i < lib.size(); ++i) {
    if (lib.cell(i).is_sequential) continue;
    if (functions.size() == 0) {
      allowed[i] = 1;
      continue;
    }
    for (const auto& f : functions) {
      if (lib.table(i) == f) allowed[i] = 1;
    }
  }
  return allowed;
}

std::vector<CandidateCombination> all_covers(const PrimitiveDag& dag, const CellLibrary& lib) {
  using namespace prim;
  struct Policy {
    Style style;
    std::vector<char> allowed;
    bool unit_cost;
  };
  const auto all = cells_with(lib, {});
  std::vector<Policy> policies{
      {Style::kSop, cells_with(lib, {inv(), and2(), or2()}), false},
      {Style::kSop, all, false},
      {Style::kSop, all, true},
      {Style::kNand, all, false},
      {Style::kNand, cells_with(lib, {inv(), nand2()}), false},
      {Style::kNor, cells_with(lib, {inv(), nor2()}), false},
      {Style::kXor, all, false},
      {Style::kXor, cells_with(lib, {inv(), and2(), or2(), xor2(), xnor2()}), false},
      {Style::kXorNand, cells_with(lib, {inv(), nand2()}), false},
      {Style::kXorNand, all, false},
  };
  const TruthTable target = evaluate(dag);
  std::vector<CandidateCombination> out;
  std::set<std::uint64_t> seen;
  std::map<Style, PrimitiveDag> styled;
  for (const auto& p : policies) {
    auto it = styled.find(p.style);
    if (it == styled.end()) it = styled.emplace(p.style, p.style == Style::kSop ? dag : restyle(dag, p.style)).first;
    auto comb = CutMapper(it->second, lib, p.allowed, p.unit_cost).run();
    if (!comb) continue;
    prune(*comb);
    comb->table = evaluate(*comb, lib);
    if (!well_formed(*comb, lib) || comb->table != target) continue;
    if (seen.insert(structural_hash(*comb, lib)).second) out.push_back(std::move(*comb));
  }
  return out;
}

}  // namespace

std::vector<CandidateCombination> explore_indirect(const PrimitiveDag& dag, const CellLibrary& lib, int max_cells) {
  std::vector<CandidateCombination> out;
  for (auto& c : all_covers(dag, lib)) {
    if (c.size() <= max_cells) out.push_back(std::move(c));
  }
  return out;
}

int smallest_indirect_size(const PrimitiveDag& dag, const CellLibrary& lib) {
  int best = INT_MAX;
  for (const auto& c : all_covers(dag, lib)) best = std::min(best, c.size());
  if (best == INT_MAX) throw Error(ErrorKind::kInfeasible, "library admits no cover of the function");
  return best;
}

double sa_objective(const CandidateCombination& comb, const CellLibrary& lib, const SAConfig& cfg) {
  return cfg.w_area * total_area(comb, lib) + cfg.w_power * total_cap(comb, lib);
}

namespace {

// ---------------------------------------------------------------------------
// Small-function rewrite library: every realization of a one- or two-input
// function with at most three cells, built from one representative cell per
// distinct function of arity <= 2.

struct RewriteDb {
  std::map<std::pair<int, std::uint64_t>, std::vector<CandidateCombination>> entries;
};

std::uint64_t library_fingerprint(const CellLibrary& lib) {
  std::uint64_t h = std::hash<std::string>{}(lib.name());
  for (const auto& c : lib.cells()) {
    h = h * 1000003 ^ std::hash<std::string>{}(c.name + c.function);
    h = h * 1000003 ^ std::hash<double>{}(c.area);
  }
  return h;
}

std::shared_ptr<const RewriteDb> rewrite_db(const CellLibrary& lib) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const RewriteDb>> cache;
  const auto fp = library_fingerprint(lib);
  std::lock_guard lock(mu);
  if (auto it = cache.find(fp); it != cache.end()) return it->second;

  std::vector<int> reps;
  std::map<TruthTable, int, decltype([](const TruthTable& a, const TruthTable& b) {
             return std::make_pair(a.num_inputs(), a.to_string()) < std::make_pair(b.num_inputs(), b.to_string());
           })>
      by_fn;
  for (int i = 0; i < lib.size(); ++i) {
    const auto& c = lib.cell(i);
    if (c.is_sequential || c.inputs.size() > 2 || c.inputs.empty()) continue;
    auto [it, fresh] = by_fn.emplace(lib.table(i), i);
    if (!fresh && c.area < lib.cell(it->second).area) it->second = i;
  }
  for (auto& [t, i] : by_fn) reps.push_back(i);
  std::sort(reps.begin(), reps.end());

  auto db = std::make_shared<RewriteDb>();
  constexpr int kMaxNodes = 3;
  std::set<std::uint64_t> seen;
  for (int k = 1; k <= 2; ++k) {
    CandidateCombination cur;
    cur.num_inputs = k;
    std::vector<std::uint64_t> val;
    for (int i = 0; i < k; ++i) val.push_back(input_column(k, i)[0]);
    std::function<void()> grow = [&]() {
      const int avail = k + cur.size();
      for (int c : reps) {
        const int a = static_cast<int>(lib.cell(c).inputs.size());
        const int combos = a == 1 ? avail : avail * avail;
        for (int x = 0; x < combos; ++x) {
          CombNode node{c, a == 1 ? std::vector<int>{x} : std::vector<int>{x % avail, x / avail}};
          std::uint64_t in[2] = {val[node.fanin[0]], a > 1 ? val[node.fanin[1]] : 0};
          cur.nodes.push_back(node);
          val.push_back(lib.cell(c).expr.eval(std::span<const std::uint64_t>(in, a)) & row_mask(k));
          cur.outputs = {k + cur.size() - 1};
          // Every node must feed the root.
          std::vector<char> live(cur.nodes.size(), 0);
          live.back() = 1;
          for (int j = cur.size() - 1; j >= 0; --j) {
            if (!live[j]) continue;
            for (int f : cur.nodes[j].fanin) {
              if (f >= k) live[f - k] = 1;
            }
          }
          if (std::all_of(live.begin(), live.end(), [](char v) { return v; })) {
            const auto h = structural_hash(cur, lib);
            if (seen.insert(h).second) {
              CandidateCombination e = cur;
              e.table = evaluate(e, lib);
              db->entries[{k, val.back()}].push_back(std::move(e));
            }
          }
          if (cur.size() < kMaxNodes) grow();
          cur.nodes.pop_back();
          val.pop_back();
        }
      }
    };
    grow();
  }
  cache[fp] = db;
  return db;
}

// ---------------------------------------------------------------------------
// Annealing moves. Moves append nodes and redirect references; `normalize`
// restores topological order and drops dead nodes.

void redirect(CandidateCombination& c, int from, int to) {
  for (auto& node : c.nodes) {
    for (int& f : node.fanin) {
      if (f == from) f = to;
    }
  }
  for (int& o : c.outputs) {
    if (o == from) o = to;
  }
}

bool normalize(CandidateCombination& c) {
  const int n = c.num_inputs;
  std::vector<int> state(c.nodes.size(), 0);  // 0 new, 1 active, 2 done
  std::vector<int> order;
  bool ok = true;
  std::function<void(int)> visit = [&](int s) {
    if (s < n || !ok) return;
    const int k = s - n;
    if (state[k] == 2) return;
    if (state[k] == 1) {
      ok = false;
      return;
    }
    state[k] = 1;
    for (int f : c.nodes[k].fanin) visit(f);
    state[k] = 2;
    order.push_back(k);
  };
  for (int o : c.outputs) visit(o);
  if (!ok) return false;
  std::vector<int> remap(n + c.nodes.size(), -1);
  for (int i = 0; i < n; ++i) remap[i] = i;
  std::vector<CombNode> nodes;
  for (int k : order) {
    remap[n + k] = n + static_cast<int>(nodes.size());
    nodes.push_back(c.nodes[k]);
  }
  for (auto& node : nodes) {
    for (int& f : node.fanin) f = remap[f];
  }
  for (int& o : c.outputs) o = remap[o];
  c.nodes = std::move(nodes);
  return true;
}

TruthTable complement_input(const TruthTable& t, int pin) {
  TruthTable out(t.num_inputs(), t.num_outputs());
  for (std::size_t r = 0; r < t.num_rows(); ++r) out.set_row(r, t.row(r ^ (std::size_t{1} << pin)));
  return out;
}

TruthTable complement_output(const TruthTable& t) {
  TruthTable out(t.num_inputs(), t.num_outputs());
  const std::uint32_t mask = t.num_outputs() >= 32 ? ~0u : ((1u << t.num_outputs()) - 1);
  for (std::size_t r = 0; r < t.num_rows(); ++r) out.set_row(r, ~t.row(r) & mask);
  return out;
}

class Annealer {
 public:
  Annealer(const TruthTable& target, const CellLibrary& lib, const SAConfig& cfg)
      : target_(target), lib_(lib), cfg_(cfg), rng_(cfg.seed), db_(rewrite_db(lib)) {
    for (int i = 0; i < lib.size(); ++i) {
      if (!lib.cell(i).is_sequential && lib.table(i) == prim::inv()) inverters_.push_back(i);
    }
  }

  std::optional<CandidateCombination> propose(const CandidateCombination& cur) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      CandidateCombination next = cur;
      bool applied = false;
      switch (pick(6)) {
        case 0: applied = substitute(next); break;
        case 1: applied = rewrite_region(next); break;
        case 2: applied = remove_inverter_pair(next); break;
        case 3: applied = absorb_inverter(next); break;
        case 4: applied = insert_inverter_pair(next); break;
        case 5: applied = npn_rewrite(next); break;
      }
      if (!applied || !normalize(next)) continue;
      if (next.size() > cfg_.max_cells || !well_formed(next, lib_)) continue;
      next.table = evaluate(next, lib_);
      if (next.table != target_) continue;
      return next;
    }
    return std::nullopt;
  }

  int pick(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_)); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

 private:
  int random_node(const CandidateCombination& c) { return c.size() ? pick(c.size()) : -1; }

  std::vector<int> readers(const CandidateCombination& c, int s) const {
    std::vector<int> r;
    for (int k = 0; k < c.size(); ++k) {
      if (std::find(c.nodes[k].fanin.begin(), c.nodes[k].fanin.end(), s) != c.nodes[k].fanin.end()) r.push_back(k);
    }
    return r;
  }

  bool is_output(const CandidateCombination& c, int s) const {
    return std::find(c.outputs.begin(), c.outputs.end(), s) != c.outputs.end();
  }

  bool is_inv(const CandidateCombination& c, int s) const {
    return c.is_node(s) && lib_.table(c.nodes[c.node_of(s)].cell) == prim::inv();
  }

  int append(CandidateCombination& c, CombNode node) {
    c.nodes.push_back(std::move(node));
    return c.num_inputs + c.size() - 1;
  }

  const CellLibrary::Match& random_match(const std::vector<CellLibrary::Match>& ms) { return ms[pick(static_cast<int>(ms.size()))]; }

  // Same function, different cell (typically another drive).
  bool substitute(CandidateCombination& c) {
    int k = random_node(c);
    if (k < 0) return false;
    std::vector<int> alt;
    for (int j : lib_.same_function(c.nodes[k].cell)) {
      if (j != c.nodes[k].cell) alt.push_back(j);
    }
    if (alt.empty()) return false;
    c.nodes[k].cell = alt[pick(static_cast<int>(alt.size()))];
    return true;
  }

  // Replace a node, optionally with its single-reader fanin nodes, by another
  // small realization of the same function over the same leaves.
  bool rewrite_region(CandidateCombination& c) {
    int k = random_node(c);
    if (k < 0) return false;
    const int n = c.num_inputs;
    const int root = n + k;
    std::vector<int> region{root};
    auto inside = [&](int s) { return std::find(region.begin(), region.end(), s) != region.end(); };
    const int grow = pick(3);
    if (grow == 1) {
      for (int f : c.nodes[k].fanin) {
        if (c.is_node(f) && !is_output(c, f) && readers(c, f).size() == 1 && !inside(f)) region.push_back(f);
      }
    } else if (grow == 2) {
      // Fanout-free cone: absorb fanins read only from inside the region.
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t r = 0; r < region.size(); ++r) {
          for (int f : c.nodes[c.node_of(region[r])].fanin) {
            if (!c.is_node(f) || is_output(c, f) || inside(f)) continue;
            const auto rd = readers(c, f);
            if (std::all_of(rd.begin(), rd.end(), [&](int j) { return inside(c.num_inputs + j); })) {
              region.push_back(f);
              changed = true;
            }
          }
        }
      }
    }
    std::set<int> leaf_set;
    for (int s : region) {
      for (int f : c.nodes[c.node_of(s)].fanin) {
        if (std::find(region.begin(), region.end(), f) == region.end()) leaf_set.insert(f);
      }
    }
    if (leaf_set.empty() || leaf_set.size() > 2) return false;
    std::vector<int> leaves(leaf_set.begin(), leaf_set.end());
    const int kk = static_cast<int>(leaves.size());
    std::map<int, std::uint64_t> val;
    for (int i = 0; i < kk; ++i) val[leaves[i]] = input_column(kk, i)[0];
    std::function<std::uint64_t(int)> eval = [&](int s) -> std::uint64_t {
      if (auto it = val.find(s); it != val.end()) return it->second;
      const auto& node = c.nodes[c.node_of(s)];
      std::vector<std::uint64_t> in;
      for (int f : node.fanin) in.push_back(eval(f));
      return val[s] = lib_.cell(node.cell).expr.eval(in);
    };
    std::uint64_t fn = eval(root) & row_mask(kk);
    // Optionally realize the region through complemented leaves or output.
    int neg = 0;
    if (!inverters_.empty() && pick(2)) {
      neg = 1 + pick((2 << kk) - 1);
      TruthTable g(kk, 1);
      for (std::size_t r = 0; r < g.num_rows(); ++r) g.set_row(r, static_cast<std::uint32_t>(fn >> r & 1));
      for (int i = 0; i < kk; ++i) {
        if (neg >> (i + 1) & 1) g = complement_input(g, i);
      }
      if (neg & 1) g = complement_output(g);
      fn = g.output_bits(0)[0] & row_mask(kk);
    }
    auto it = db_->entries.find({kk, fn});
    if (it == db_->entries.end() || it->second.empty()) return false;
    const auto& entry = it->second[pick(static_cast<int>(it->second.size()))];
    std::vector<int> local(kk + entry.size());
    for (int i = 0; i < kk; ++i) {
      local[i] = neg >> (i + 1) & 1 ? append(c, {inverters_[0], {leaves[i]}}) : leaves[i];
    }
    for (int j = 0; j < entry.size(); ++j) {
      CombNode node{entry.nodes[j].cell, {}};
      for (int f : entry.nodes[j].fanin) node.fanin.push_back(local[f]);
      local[kk + j] = append(c, std::move(node));
    }
    int new_root = local[entry.outputs[0]];
    if (neg & 1) new_root = append(c, {inverters_[0], {new_root}});
    if (is_output(c, new_root)) return false;
    redirect(c, root, new_root);
    return true;
  }

  bool remove_inverter_pair(CandidateCombination& c) {
    std::vector<int> cands;
    for (int k = 0; k < c.size(); ++k) {
      const int s = c.num_inputs + k;
      if (is_inv(c, s) && is_inv(c, c.nodes[k].fanin[0])) cands.push_back(s);
    }
    if (cands.empty()) return false;
    const int s = cands[pick(static_cast<int>(cands.size()))];
    const int x = c.nodes[c.node_of(c.nodes[c.node_of(s)].fanin[0])].fanin[0];
    if (is_output(c, s) && (!c.is_node(x) || is_output(c, x))) return false;
    redirect(c, s, x);
    return true;
  }

  bool absorb_inverter(CandidateCombination& c) {
    const int k = random_node(c);
    if (k < 0) return false;
    const int s = c.num_inputs + k;
    const auto node = c.nodes[k];
    const auto& t = lib_.table(node.cell);
    if (pick(2)) {
      std::vector<int> pins;
      for (std::size_t p = 0; p < node.fanin.size(); ++p) {
        if (is_inv(c, node.fanin[p])) pins.push_back(static_cast<int>(p));
      }
      if (pins.empty()) return false;
      const int p = pins[pick(static_cast<int>(pins.size()))];
      auto ms = lib_.match(complement_input(t, p));
      if (ms.empty()) return false;
      const auto& m = random_match(ms);
      CombNode repl{m.cell, std::vector<int>(node.fanin.size())};
      for (std::size_t i = 0; i < node.fanin.size(); ++i) {
        int src = node.fanin[i];
        if (static_cast<int>(i) == p) src = c.nodes[c.node_of(src)].fanin[0];
        repl.fanin[m.perm[i]] = src;
      }
      redirect(c, s, append(c, std::move(repl)));
      return true;
    }
    auto rd = readers(c, s);
    if (is_output(c, s) || rd.size() != 1 || !is_inv(c, c.num_inputs + rd[0])) return false;
    auto ms = lib_.match(complement_output(t));
    if (ms.empty()) return false;
    const auto& m = random_match(ms);
    CombNode repl{m.cell, std::vector<int>(node.fanin.size())};
    for (std::size_t i = 0; i < node.fanin.size(); ++i) repl.fanin[m.perm[i]] = node.fanin[i];
    redirect(c, c.num_inputs + rd[0], append(c, std::move(repl)));
    return true;
  }

  bool insert_inverter_pair(CandidateCombination& c) {
    if (inverters_.empty() || c.size() + 2 > cfg_.max_cells) return false;
    std::vector<std::pair<int, int>> sites;  // (node, pin); node -1 means output pin
    for (int k = 0; k < c.size(); ++k) {
      for (std::size_t p = 0; p < c.nodes[k].fanin.size(); ++p) sites.push_back({k, static_cast<int>(p)});
    }
    for (std::size_t j = 0; j < c.outputs.size(); ++j) sites.push_back({-1, static_cast<int>(j)});
    const auto [k, p] = sites[pick(static_cast<int>(sites.size()))];
    const int x = k < 0 ? c.outputs[p] : c.nodes[k].fanin[p];
    const int a = append(c, {inverters_[pick(static_cast<int>(inverters_.size()))], {x}});
    const int b = append(c, {inverters_[pick(static_cast<int>(inverters_.size()))], {a}});
    if (k < 0) c.outputs[p] = b;
    else c.nodes[k].fanin[p] = b;
    return true;
  }

  // Re-express a node through a cell computing it under input and output
  // complementation, with explicit inverters.
  bool npn_rewrite(CandidateCombination& c) {
    if (inverters_.empty()) return false;
    const int k = random_node(c);
    if (k < 0) return false;
    const auto node = c.nodes[k];
    const int a = static_cast<int>(node.fanin.size());
    const int variants = 1 << (a + 1);
    const int v = 1 + pick(variants - 1);
    const bool out_neg = v & 1;
    const int in_mask = v >> 1;
    TruthTable g = lib_.table(node.cell);
    for (int p = 0; p < a; ++p) {
      if (in_mask >> p & 1) g = complement_input(g, p);
    }
    if (out_neg) g = complement_output(g);
    auto ms = lib_.match(g);
    if (ms.empty()) return false;
    const auto& m = random_match(ms);
    const int inv = inverters_[0];
    CombNode repl{m.cell, std::vector<int>(a)};
    for (int i = 0; i < a; ++i) {
      int src = node.fanin[i];
      if (in_mask >> i & 1) src = append(c, {inv, {src}});
      repl.fanin[m.perm[i]] = src;
    }
    int out = append(c, std::move(repl));
    if (out_neg) out = append(c, {inv, {out}});
    redirect(c, c.num_inputs + k, out);
    return true;
  }

  const TruthTable& target_;
  const CellLibrary& lib_;
  const SAConfig& cfg_;
  std::mt19937_64 rng_;
  std::shared_ptr<const RewriteDb> db_;
  std::vector<int> inverters_;
};

}  // namespace

CandidateSet simulated_annealing(const std::vector<CandidateCombination>& seeds, const TruthTable& target,
                                 const CellLibrary& lib, const SAConfig& cfg) {
  cfg.validate();
  struct Entry {
    double objective;
    std::uint64_t hash;
    CandidateCombination comb;
  };
  std::map<std::uint64_t, Entry> pool;
  auto record = [&](const CandidateCombination& c) {
    const auto h = structural_hash(c, lib);
    if (!pool.count(h)) pool.emplace(h, Entry{sa_objective(c, lib, cfg), h, c});
  };
  auto admissible = [&](const CandidateCombination& c) {
    return c.size() <= cfg.max_cells && well_formed(c, lib) && evaluate(c, lib) == target;
  };

  std::vector<CandidateCombination> start;
  for (const auto& s : seeds) {
    if (admissible(s)) start.push_back(s);
  }
  if (start.empty()) {
    for (auto& c : explore_indirect(decompose(target), lib, cfg.max_cells)) start.push_back(std::move(c));
  }
  if (start.empty()) {
    throw Error(ErrorKind::kInfeasible, "no candidate combination fits " + std::to_string(cfg.max_cells) + " cells");
  }
  for (auto& s : start) s.table = target;
  for (const auto& s : start) record(s);

  CandidateCombination current = start.front();
  double current_obj = sa_objective(current, lib, cfg);
  for (const auto& s : start) {
    double o = sa_objective(s, lib, cfg);
    if (o < current_obj) {
      current = s;
      current_obj = o;
    }
  }

  Annealer annealer(target, lib, cfg);
  double temp = cfg.initial_temp;
  for (int it = 0; it < cfg.iterations; ++it) {
    if (auto next = annealer.propose(current)) {
      record(*next);
      const double obj = sa_objective(*next, lib, cfg);
      const double delta = obj - current_obj;
      if (delta <= 0.0 || annealer.uniform() < std::exp(-delta / temp)) {
        current = std::move(*next);
        current_obj = obj;
      }
    }
    temp *= cfg.cooling_rate;
  }

  std::vector<Entry*> ranked;
  for (auto& [h, e] : pool) ranked.push_back(&e);
  std::sort(ranked.begin(), ranked.end(), [](const Entry* a, const Entry* b) {
    return std::tie(a->objective, a->hash) < std::tie(b->objective, b->hash);
  });
  CandidateSet out;
  for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < cfg.keep_top_k; ++i) {
    out.combinations.push_back(std::move(ranked[i]->comb));
  }
  return out;
}

}  // namespace scmap
