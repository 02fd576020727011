// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/cell_library.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "scmap/error.hpp"

namespace scmap {

namespace {

class ExprParser {
 public:
  ExprParser(std::string_view text, std::span<const std::string> pins)
      : text_(text), pins_(pins) {}

  std::vector<BoolExpr::Instr> run() {
    parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  using Op = BoolExpr::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::kValidation,
                "bad cell function \"" + std::string(text_) + "\": " + msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void parse_or() {
    parse_xor();
    while (accept('|')) {
      parse_xor();
      out_.push_back({Op::kOr});
    }
  }

  void parse_xor() {
    parse_and();
    while (accept('^')) {
      parse_and();
      out_.push_back({Op::kXor});
    }
  }

  void parse_and() {
    parse_unary();
    while (accept('&')) {
      parse_unary();
      out_.push_back({Op::kAnd});
    }
  }

  void parse_unary() {
    if (accept('!')) {
      parse_unary();
      out_.push_back({Op::kNot});
      return;
    }
    if (accept('(')) {
      parse_or();
      if (!accept(')')) fail("missing ')'");
      return;
    }
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected operand");
    std::string_view tok = text_.substr(start, pos_ - start);
    if (tok == "0") {
      out_.push_back({Op::kConst0});
      return;
    }
    if (tok == "1") {
      out_.push_back({Op::kConst1});
      return;
    }
    auto it = std::find(pins_.begin(), pins_.end(), tok);
    if (it == pins_.end()) fail("unknown pin '" + std::string(tok) + "'");
    out_.push_back({Op::kPin, static_cast<int>(it - pins_.begin())});
  }

  std::string_view text_;
  std::span<const std::string> pins_;
  std::size_t pos_ = 0;
  std::vector<BoolExpr::Instr> out_;
};

// Drive family stem: "NAND2_X4" -> ("NAND2", 4).
std::optional<std::pair<std::string, int>> drive_family(const std::string& name) {
  static const std::regex kDrive(R"((.+)_X(\d+)$)");
  std::smatch m;
  if (!std::regex_match(name, m, kDrive)) return std::nullopt;
  return std::make_pair(m[1].str(), std::stoi(m[2].str()));
}

void validate_families(const std::vector<StdCell>& cells,
                       const std::vector<TruthTable>& tables) {
  std::map<std::string, std::vector<std::pair<int, int>>> families;
  for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
    if (auto fam = drive_family(cells[i].name)) families[fam->first].push_back({fam->second, i});
  }
  for (auto& [stem, members] : families) {
    std::sort(members.begin(), members.end());
    for (std::size_t k = 1; k < members.size(); ++k) {
      const auto& lo = cells[members[k - 1].second];
      const auto& hi = cells[members[k].second];
      if (lo.is_sequential != hi.is_sequential ||
          (!lo.is_sequential && !(tables[members[k - 1].second] == tables[members[k].second]))) {
        throw Error(ErrorKind::kValidation,
                    "drive family " + stem + " mixes functions (" + lo.name + ", " + hi.name + ")");
      }
      if (!(hi.ds > lo.ds)) {
        throw Error(ErrorKind::kValidation,
                    "drive family " + stem + ": ds must increase with drive (" + lo.name +
                        " -> " + hi.name + ")");
      }
      if (hi.cap < lo.cap) {
        throw Error(ErrorKind::kValidation,
                    "drive family " + stem + ": cap must not decrease with drive (" +
                        lo.name + " -> " + hi.name + ")");
      }
    }
  }
}

}  // namespace

BoolExpr BoolExpr::parse(std::string_view text, std::span<const std::string> pins) {
  BoolExpr e;
  e.program_ = ExprParser(text, pins).run();
  return e;
}

std::uint64_t BoolExpr::eval(std::span<const std::uint64_t> inputs) const {
  std::uint64_t stack[64];
  int sp = 0;
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::kPin: stack[sp++] = inputs[in.pin]; break;
      case Op::kConst0: stack[sp++] = 0; break;
      case Op::kConst1: stack[sp++] = ~std::uint64_t{0}; break;
      case Op::kNot: stack[sp - 1] = ~stack[sp - 1]; break;
      case Op::kAnd: --sp; stack[sp - 1] &= stack[sp]; break;
      case Op::kOr: --sp; stack[sp - 1] |= stack[sp]; break;
      case Op::kXor: --sp; stack[sp - 1] ^= stack[sp]; break;
    }
  }
  return stack[0];
}

TruthTable cell_truth_table(const StdCell& cell) {
  if (cell.is_sequential) {
    throw Error(ErrorKind::kValidation, "cell " + cell.name + " is sequential");
  }
  const int n = static_cast<int>(cell.inputs.size());
  if (n > kMaxTableInputs) {
    throw Error(ErrorKind::kValidation, "cell " + cell.name + " has too many inputs");
  }
  std::vector<std::vector<std::uint64_t>> cols;
  for (int i = 0; i < n; ++i) cols.push_back(input_column(n, i));
  std::vector<std::uint64_t> out(words_for_inputs(n));
  std::vector<std::uint64_t> lane(n);
  for (std::size_t w = 0; w < out.size(); ++w) {
    for (int i = 0; i < n; ++i) lane[i] = cols[i][w];
    out[w] = cell.expr.eval(lane) & row_mask(n);
  }
  std::vector<std::vector<std::uint64_t>> outs{out};
  return TruthTable::from_output_bits(n, outs);
}

CellLibrary::CellLibrary(std::string name, std::string node_label, std::vector<StdCell> cells)
    : name_(std::move(name)), node_label_(std::move(node_label)), cells_(std::move(cells)) {
  tables_.resize(cells_.size());
  for (int i = 0; i < size(); ++i) {
    const auto& c = cells_[i];
    if (!by_name_.emplace(c.name, i).second) {
      throw Error(ErrorKind::kValidation, "duplicate cell name " + c.name);
    }
    if (!c.is_sequential) {
      tables_[i] = cell_truth_table(c);
      max_arity_ = std::max(max_arity_, static_cast<int>(c.inputs.size()));
    }
  }
  same_function_.resize(cells_.size());
  for (int i = 0; i < size(); ++i) {
    if (cells_[i].is_sequential) continue;
    for (int j = 0; j < size(); ++j) {
      if (!cells_[j].is_sequential && tables_[i] == tables_[j]) same_function_[i].push_back(j);
    }
  }
  // Index every input permutation of every cell; the first permutation in
  // lexicographic order wins for each (cell, table) pair.
  for (int i = 0; i < size(); ++i) {
    if (cells_[i].is_sequential) continue;
    const int n = static_cast<int>(cells_[i].inputs.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      const TruthTable t = tables_[i].permute_inputs(perm);
      auto& hits = match_index_[{n, std::vector<std::uint32_t>(t.rows().begin(), t.rows().end())}];
      if (hits.empty() || hits.back().cell != i) hits.push_back({i, perm});
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

std::optional<int> CellLibrary::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const StdCell& CellLibrary::at(std::string_view name) const {
  auto idx = find(name);
  if (!idx) throw Error(ErrorKind::kValidation, "unknown cell " + std::string(name));
  return cells_[*idx];
}

std::vector<CellLibrary::Match> CellLibrary::match(const TruthTable& target) const {
  if (target.num_outputs() != 1) return {};
  auto it = match_index_.find({target.num_inputs(), std::vector<std::uint32_t>(target.rows().begin(), target.rows().end())});
  return it == match_index_.end() ? std::vector<Match>{} : it->second;
}

std::optional<CellLibrary::Match> CellLibrary::cheapest_match(const TruthTable& target) const {
  std::optional<Match> best;
  for (auto& m : match(target)) {
    if (!best || cells_[m.cell].area < cells_[best->cell].area) best = std::move(m);
  }
  return best;
}

int CellLibrary::default_flop() const {
  int best = -1;
  for (int i = 0; i < size(); ++i) {
    if (cells_[i].is_sequential && (best < 0 || cells_[i].area < cells_[best].area)) best = i;
  }
  if (best < 0) throw Error(ErrorKind::kValidation, "library " + name_ + " has no flip-flop");
  return best;
}

CellLibrary parse_library(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kValidation, std::string("library JSON: ") + e.what());
  }
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::kValidation, "library schema: " + msg);
  };
  require(doc.is_object(), "top level must be an object");
  require(doc.contains("name") && doc["name"].is_string(), "\"name\" must be a string");
  require(doc.contains("cells") && doc["cells"].is_array(), "\"cells\" must be an array");
  std::string node = doc.value("node_label", "");

  std::vector<StdCell> cells;
  for (const auto& jc : doc["cells"]) {
    require(jc.is_object(), "cell entries must be objects");
    StdCell c;
    require(jc.contains("name") && jc["name"].is_string(), "cell name must be a string");
    c.name = jc["name"].get<std::string>();
    const std::string where = "cell " + c.name + ": ";
    require(jc.contains("inputs") && jc["inputs"].is_array(), where + "\"inputs\" must be an array");
    for (const auto& p : jc["inputs"]) {
      require(p.is_string(), where + "pin names must be strings");
      c.inputs.push_back(p.get<std::string>());
    }
    require(jc.contains("output") && jc["output"].is_string(), where + "\"output\" must be a string");
    c.output = jc["output"].get<std::string>();
    c.is_sequential = jc.value("sequential", false);
    require(jc.contains("function") && jc["function"].is_string(), where + "\"function\" must be a string");
    c.function = jc["function"].get<std::string>();
    for (const char* key : {"ds", "cap", "area"}) {
      require(jc.contains(key) && jc[key].is_number(), where + "\"" + key + "\" must be a number");
    }
    c.ds = jc["ds"].get<double>();
    c.cap = jc["cap"].get<double>();
    c.area = jc["area"].get<double>();
    if (!(c.ds > 0)) throw Error(ErrorKind::kValidation, where + "ds must be > 0");
    if (!(c.cap > 0)) throw Error(ErrorKind::kValidation, where + "cap must be > 0");
    if (!(c.area >= 0)) throw Error(ErrorKind::kValidation, where + "area must be >= 0");
    if (c.inputs.empty()) throw Error(ErrorKind::kValidation, where + "needs at least one input");
    if (c.is_sequential) {
      if (c.inputs.size() != 1) throw Error(ErrorKind::kValidation, where + "flip-flops take one data pin");
      c.expr = BoolExpr::parse(c.inputs[0], c.inputs);
    } else {
      if (c.inputs.size() > kMaxTableInputs) throw Error(ErrorKind::kValidation, where + "too many inputs");
      c.expr = BoolExpr::parse(c.function, c.inputs);
    }
    cells.push_back(std::move(c));
  }

  CellLibrary lib(doc["name"].get<std::string>(), node, std::move(cells));

  std::vector<TruthTable> tables;
  for (int i = 0; i < lib.size(); ++i) tables.push_back(lib.cell(i).is_sequential ? TruthTable() : lib.table(i));
  validate_families({lib.cells().begin(), lib.cells().end()}, tables);

  // Decomposition emits AND/OR/NOT networks and registers map one-to-one, so
  // those four must be coverable directly.
  std::vector<std::string> missing;
  if (lib.match(prim::inv()).empty()) missing.push_back("NOT");
  if (lib.match(prim::and2()).empty()) missing.push_back("AND");
  if (lib.match(prim::or2()).empty()) missing.push_back("OR");
  bool has_flop = std::any_of(lib.cells().begin(), lib.cells().end(),
                              [](const StdCell& c) { return c.is_sequential; });
  if (!has_flop) missing.push_back("DFF");
  if (!missing.empty()) {
    std::string list;
    for (auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::kValidation,
                "library " + lib.name() + " lacks primitive coverage for: " + list);
  }
  return lib;
}

CellLibrary load_library(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open library " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_library(ss.str());
}

namespace prim {
TruthTable inv() { return TruthTable(1, 1, {1, 0}); }
TruthTable buf() { return TruthTable(1, 1, {0, 1}); }
TruthTable and2() { return TruthTable(2, 1, {0, 0, 0, 1}); }
TruthTable or2() { return TruthTable(2, 1, {0, 1, 1, 1}); }
TruthTable nand2() { return TruthTable(2, 1, {1, 1, 1, 0}); }
TruthTable nor2() { return TruthTable(2, 1, {1, 0, 0, 0}); }
TruthTable xor2() { return TruthTable(2, 1, {0, 1, 1, 0}); }
TruthTable xnor2() { return TruthTable(2, 1, {1, 0, 0, 1}); }
}  // namespace prim

}  // namespace scmap
