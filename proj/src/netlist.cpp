// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "scmap/error.hpp"
#include "scmap/logic_graph.hpp"

namespace scmap {

namespace {

constexpr std::pair<BlockKind, std::string_view> kKindNames[] = {
    {BlockKind::kAnd, "and"},   {BlockKind::kOr, "or"},     {BlockKind::kXor, "xor"},
    {BlockKind::kNot, "not"},   {BlockKind::kNand, "nand"}, {BlockKind::kNor, "nor"},
    {BlockKind::kMux, "mux"},   {BlockKind::kAdd, "add"},   {BlockKind::kTable, "table"},
    {BlockKind::kDff, "dff"},
};

struct Token {
  std::string text;
  int column;
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(pos, end - pos);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i >= raw.size()) break;
      std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      line.tokens.push_back({std::string(raw.substr(start, i - start)), static_cast<int>(start) + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == ',' || c == '#' ||
        c == '[' || c == ']')
      return false;
  }
  return true;
}

struct RawRef {
  std::string name;
  int bit = -1;  // -1: whole net
  int line = 0;
  int column = 0;
};

struct RawBlock {
  BlockKind kind;
  std::string name;
  std::vector<RawRef> in;
  std::vector<RawRef> out;
  int line;
  int column;
};

struct RawInst {
  std::string cell;
  std::string name;
  std::vector<std::pair<std::string, RawRef>> pins;
  int line;
};

struct RawTable {
  std::string hex;
  int line;
  int column;
};

// Parses "a", "a[3]" into a reference.
RawRef parse_ref(const std::string& text, int line, int column) {
  RawRef r{text, -1, line, column};
  if (auto lb = text.find('['); lb != std::string::npos) {
    if (text.back() != ']' || lb == 0) throw SyntaxError(line, column, "malformed bit select '" + text + "'");
    std::string idx = text.substr(lb + 1, text.size() - lb - 2);
    if (idx.empty() || !std::all_of(idx.begin(), idx.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw SyntaxError(line, column, "malformed bit select '" + text + "'");
    }
    r.name = text.substr(0, lb);
    r.bit = std::stoi(idx);
  }
  if (!valid_name(r.name)) throw SyntaxError(line, column, "bad net name '" + text + "'");
  return r;
}

std::vector<RawRef> parse_ref_list(const Token& tok, std::string_view key, int line) {
  const std::string prefix = std::string(key) + "=";
  if (tok.text.rfind(prefix, 0) != 0) {
    throw SyntaxError(line, tok.column, "expected " + prefix + "<net[,net...]>");
  }
  std::vector<RawRef> refs;
  std::string body = tok.text.substr(prefix.size());
  if (body.empty()) throw SyntaxError(line, tok.column, "empty " + std::string(key) + "= list");
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    std::string item = body.substr(pos, comma - pos);
    if (item.empty()) throw SyntaxError(line, tok.column, "empty entry in " + std::string(key) + "= list");
    refs.push_back(parse_ref(item, line, tok.column + static_cast<int>(prefix.size() + pos)));
    pos = comma + 1;
    if (comma == body.size()) break;
  }
  return refs;
}

class ModuleBuilder {
 public:
  ModuleBuilder(std::string name, int line, int& next_net, int& next_block)
      : next_net_(next_net), next_block_(next_block) {
    module_.name = std::move(name);
    line_ = line;
  }

  void add_wire(const Line& l) {
    if (l.tokens.size() != 4) throw SyntaxError(l.number, l.tokens[0].column, "expected: wire <width> <input|output|internal> <name>");
    const auto& wtok = l.tokens[1];
    if (!std::all_of(wtok.text.begin(), wtok.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw SyntaxError(l.number, wtok.column, "width must be a decimal integer");
    }
    int width = std::stoi(wtok.text);
    if (width < 1 || width > 4096) throw SyntaxError(l.number, wtok.column, "width must be >= 1");
    PortDir dir;
    const auto& d = l.tokens[2].text;
    if (d == "input") dir = PortDir::kInput;
    else if (d == "output") dir = PortDir::kOutput;
    else if (d == "internal") dir = PortDir::kInternal;
    else throw SyntaxError(l.number, l.tokens[2].column, "direction must be input, output or internal");
    const auto& name = l.tokens[3];
    if (!valid_name(name.text)) throw SyntaxError(l.number, name.column, "bad net name '" + name.text + "'");
    declare(name.text, width, dir, l.number, name.column);
  }

  void add_block(const Line& l) {
    if (l.tokens.size() != 5) throw SyntaxError(l.number, l.tokens[0].column, "expected: block <kind> <name> in=... out=...");
    auto kind = parse_block_kind(l.tokens[1].text);
    if (!kind) throw SyntaxError(l.number, l.tokens[1].column, "unknown block kind '" + l.tokens[1].text + "'");
    const auto& name = l.tokens[2];
    if (!valid_name(name.text) && name.text.find('[') == std::string::npos) {
      throw SyntaxError(l.number, name.column, "bad block name");
    }
    raw_blocks_.push_back({*kind, name.text, parse_ref_list(l.tokens[3], "in", l.number),
                           parse_ref_list(l.tokens[4], "out", l.number), l.number, name.column});
  }

  void add_table(const Line& l) {
    if (l.tokens.size() < 3) throw SyntaxError(l.number, l.tokens[0].column, "expected: table <name> <hex entries>");
    std::string hex;
    for (std::size_t i = 2; i < l.tokens.size(); ++i) {
      for (char c : l.tokens[i].text) {
        if (!std::isxdigit(static_cast<unsigned char>(c))) throw SyntaxError(l.number, l.tokens[i].column, "table entries must be hexadecimal");
      }
      hex += l.tokens[i].text;
    }
    auto& slot = tables_[l.tokens[1].text];
    slot.hex += hex;
    if (slot.line == 0) {
      slot.line = l.number;
      slot.column = l.tokens[1].column;
    }
  }

  void add_inst(const Line& l) {
    if (l.tokens.size() < 4) throw SyntaxError(l.number, l.tokens[0].column, "expected: inst <cell> <name> pin=<net> ...");
    RawInst inst{l.tokens[1].text, l.tokens[2].text, {}, l.number};
    for (std::size_t i = 3; i < l.tokens.size(); ++i) {
      const auto& t = l.tokens[i];
      auto eq = t.text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == t.text.size()) {
        throw SyntaxError(l.number, t.column, "expected pin=<net>");
      }
      inst.pins.push_back({t.text.substr(0, eq), parse_ref(t.text.substr(eq + 1), l.number, t.column + static_cast<int>(eq) + 1)});
    }
    raw_insts_.push_back(std::move(inst));
  }

  Module finish() {
    for (auto& rb : raw_blocks_) expand_block(rb);
    for (auto& [name, t] : tables_) {
      if (!used_tables_.count(name)) throw SyntaxError(t.line, t.column, "table '" + name + "' has no TABLE block");
    }
    for (auto& ri : raw_insts_) {
      CellInstance inst{next_block_++, ri.cell, ri.name, {}};
      for (auto& [pin, ref] : ri.pins) {
        auto bits = resolve(ref);
        if (bits.size() != 1) throw SyntaxError(ref.line, ref.column, "instance pins connect single bits");
        inst.pins.push_back({pin, bits[0]});
      }
      module_.instances.push_back(std::move(inst));
    }
    check_drivers();
    return std::move(module_);
  }

 private:
  int declare(const std::string& name, int width, PortDir dir, int line, int column) {
    if (net_ids_.count(name)) throw SyntaxError(line, column, "net '" + name + "' declared twice");
    Net n{next_net_++, name, width, dir};
    net_ids_[name] = n.id;
    module_.nets.push_back(n);
    return n.id;
  }

  const Net& net_of(int id) const { return module_.nets[id - module_.nets.front().id]; }

  std::vector<Signal> resolve(const RawRef& r) const {
    auto it = net_ids_.find(r.name);
    if (it == net_ids_.end()) throw SyntaxError(r.line, r.column, "undeclared net '" + r.name + "'");
    const auto& n = net_of(it->second);
    if (r.bit >= 0) {
      if (r.bit >= n.width) throw SyntaxError(r.line, r.column, "bit " + std::to_string(r.bit) + " out of range for '" + r.name + "'");
      return {{n.id, r.bit}};
    }
    std::vector<Signal> bits;
    for (int b = 0; b < n.width; ++b) bits.push_back({n.id, b});
    return bits;
  }

  [[noreturn]] void arity(const RawBlock& rb, const std::string& msg) const {
    throw SyntaxError(rb.line, rb.column, "arity mismatch in " + std::string(to_string(rb.kind)) + " block '" + rb.name + "': " + msg);
  }

  void push(BlockKind kind, std::string name, std::vector<Signal> in, std::vector<Signal> out,
            std::optional<TruthTable> table = std::nullopt) {
    module_.blocks.push_back({next_block_++, kind, std::move(name), std::move(in), std::move(out), std::move(table)});
  }

  static std::string slice_name(const std::string& base, int w, int i) {
    return w == 1 ? base : base + "[" + std::to_string(i) + "]";
  }

  void expand_block(const RawBlock& rb) {
    std::vector<std::vector<Signal>> ops;
    for (const auto& r : rb.in) ops.push_back(resolve(r));
    std::vector<Signal> out;
    for (const auto& r : rb.out) {
      auto bits = resolve(r);
      out.insert(out.end(), bits.begin(), bits.end());
    }
    const int w = static_cast<int>(out.size());
    switch (rb.kind) {
      case BlockKind::kAnd:
      case BlockKind::kOr:
      case BlockKind::kXor:
      case BlockKind::kNand:
      case BlockKind::kNor:
      case BlockKind::kNot:
      case BlockKind::kDff: {
        const std::size_t want = (rb.kind == BlockKind::kNot || rb.kind == BlockKind::kDff) ? 1 : 2;
        if (ops.size() != want) arity(rb, "expected " + std::to_string(want) + " operand(s), got " + std::to_string(ops.size()));
        for (auto& op : ops) {
          if (static_cast<int>(op.size()) != w) arity(rb, "operand width differs from output width");
        }
        for (int i = 0; i < w; ++i) {
          std::vector<Signal> in;
          for (auto& op : ops) in.push_back(op[i]);
          push(rb.kind, slice_name(rb.name, w, i), std::move(in), {out[i]});
        }
        return;
      }
      case BlockKind::kMux: {
        if (ops.size() != 3) arity(rb, "mux takes in=sel,a,b");
        if (ops[0].size() != 1) arity(rb, "mux select must be one bit");
        if (static_cast<int>(ops[1].size()) != w || static_cast<int>(ops[2].size()) != w) arity(rb, "mux data width differs from output width");
        for (int i = 0; i < w; ++i) push(BlockKind::kMux, slice_name(rb.name, w, i), {ops[0][0], ops[1][i], ops[2][i]}, {out[i]});
        return;
      }
      case BlockKind::kAdd: {
        if (ops.size() != 2 && ops.size() != 3) arity(rb, "add takes in=a,b[,carry_in]");
        const int n = static_cast<int>(ops[0].size());
        if (static_cast<int>(ops[1].size()) != n) arity(rb, "add operands differ in width");
        if (ops.size() == 3 && ops[2].size() != 1) arity(rb, "carry-in must be one bit");
        if (w != n && w != n + 1) arity(rb, "add output must be as wide as the operands, or one bit wider");
        std::optional<Signal> carry;
        if (ops.size() == 3) carry = ops[2][0];
        for (int i = 0; i < n; ++i) {
          std::vector<Signal> in{ops[0][i], ops[1][i]};
          if (carry) in.push_back(*carry);
          std::vector<Signal> o{out[i]};
          if (i + 1 < n) {
            int id = declare(rb.name + "/c" + std::to_string(i + 1), 1, PortDir::kInternal, rb.line, rb.column);
            carry = Signal{id, 0};
            o.push_back(*carry);
          } else if (w == n + 1) {
            o.push_back(out[n]);
          }
          push(BlockKind::kAdd, slice_name(rb.name, n, i), std::move(in), std::move(o));
        }
        return;
      }
      case BlockKind::kTable: {
        std::vector<Signal> in;
        for (auto& op : ops) in.insert(in.end(), op.begin(), op.end());
        const int nin = static_cast<int>(in.size());
        if (nin > kMaxTableInputs) arity(rb, "table blocks take at most 16 input bits");
        if (w > 32) arity(rb, "table blocks produce at most 32 output bits");
        auto it = tables_.find(rb.name);
        if (it == tables_.end()) throw SyntaxError(rb.line, rb.column, "TABLE block '" + rb.name + "' has no table line");
        used_tables_.insert(rb.name);
        const auto& hex = it->second.hex;
        const std::size_t digits = std::max(1, (w + 3) / 4);
        const std::size_t entries = std::size_t{1} << nin;
        if (hex.size() != entries * digits) {
          throw SyntaxError(it->second.line, it->second.column,
                            "table '" + rb.name + "' needs " + std::to_string(entries) + " entries of " +
                                std::to_string(digits) + " hex digit(s)");
        }
        std::vector<std::uint32_t> rows(entries);
        for (std::size_t e = 0; e < entries; ++e) {
          auto v = std::stoul(hex.substr(e * digits, digits), nullptr, 16);
          if (w < 32 && (v >> w) != 0) throw SyntaxError(it->second.line, it->second.column, "table entry exceeds output width");
          rows[e] = static_cast<std::uint32_t>(v);
        }
        push(BlockKind::kTable, rb.name, std::move(in), std::move(out), TruthTable(nin, w, std::move(rows)));
        return;
      }
    }
  }

  void check_drivers() {
    if (!raw_insts_.empty()) return;  // pin directions need the library
    std::set<Signal> driven;
    for (const auto& b : module_.blocks) {
      for (auto s : b.outputs) {
        const auto& n = net_of(s.net);
        if (n.dir == PortDir::kInput) throw Error(ErrorKind::kValidation, "block " + b.name + " drives input port " + n.name);
        if (!driven.insert(s).second) throw Error(ErrorKind::kValidation, "bit " + module_.signal_name(s) + " has more than one driver");
      }
    }
    for (const auto& b : module_.blocks) {
      for (auto s : b.inputs) {
        if (net_of(s.net).dir != PortDir::kInput && !driven.count(s)) {
          throw Error(ErrorKind::kValidation, "bit " + module_.signal_name(s) + " read by " + b.name + " has no driver");
        }
      }
    }
    if (!module_.blocks.empty()) {
      for (const auto& n : module_.nets) {
        if (n.dir != PortDir::kOutput) continue;
        for (int b = 0; b < n.width; ++b) {
          if (!driven.count({n.id, b})) throw Error(ErrorKind::kValidation, "output " + module_.signal_name({n.id, b}) + " has no driver");
        }
      }
    }
    CompiledModule::compile(module_, nullptr);  // rejects combinational cycles
  }

  Module module_;
  int line_;
  int& next_net_;
  int& next_block_;
  std::map<std::string, int> net_ids_;
  std::vector<RawBlock> raw_blocks_;
  std::vector<RawInst> raw_insts_;
  std::map<std::string, RawTable> tables_;
  std::set<std::string> used_tables_;
};

}  // namespace

std::string_view to_string(BlockKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<BlockKind> parse_block_kind(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& [k, name] : kKindNames) {
    if (name == lower) return k;
  }
  return std::nullopt;
}

TruthTable block_function(const LogicBlock& block) {
  if (block.kind == BlockKind::kTable) return *block.table;
  if (block.is_sequential()) throw Error(ErrorKind::kValidation, "block " + block.name + " is sequential");
  const int n = static_cast<int>(block.inputs.size());
  const int m = static_cast<int>(block.outputs.size());
  std::vector<std::vector<std::uint64_t>> cols;
  for (int i = 0; i < n; ++i) cols.push_back(input_column(n, i));
  std::vector<std::uint64_t> in(n), out(m);
  in.resize(n);
  for (int i = 0; i < n; ++i) in[i] = cols[i][0];
  eval_block_word(block, in, out);
  std::vector<std::vector<std::uint64_t>> outs;
  for (int j = 0; j < m; ++j) outs.push_back({out[j] & row_mask(n)});
  return TruthTable::from_output_bits(n, outs);
}

const Net& Module::net(int id) const {
  if (nets.empty() || id < nets.front().id || id > nets.back().id) {
    throw Error(ErrorKind::kValidation, "unknown net id " + std::to_string(id) + " in module " + name);
  }
  return nets[id - nets.front().id];
}

std::optional<int> Module::find_net(std::string_view net_name) const {
  for (const auto& n : nets) {
    if (n.name == net_name) return n.id;
  }
  return std::nullopt;
}

const LogicBlock* Module::find_block(int id) const {
  for (const auto& b : blocks) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

std::string Module::signal_name(Signal s) const {
  const auto& n = net(s.net);
  return n.width == 1 ? n.name : n.name + "[" + std::to_string(s.bit) + "]";
}

std::vector<Signal> Module::port_bits(PortDir dir) const {
  std::vector<Signal> bits;
  for (const auto& n : nets) {
    if (n.dir != dir) continue;
    for (int b = 0; b < n.width; ++b) bits.push_back({n.id, b});
  }
  return bits;
}

const Module& Design::top_module() const {
  if (auto* m = find_module(top)) return *m;
  throw Error(ErrorKind::kValidation, "top module '" + top + "' does not exist");
}

const Module* Design::find_module(std::string_view name) const {
  for (const auto& m : modules) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::pair<const Module*, const LogicBlock*> Design::find_block(int id) const {
  for (const auto& m : modules) {
    if (auto* b = m.find_block(id)) return {&m, b};
  }
  throw Error(ErrorKind::kValidation, "unknown block id " + std::to_string(id));
}

std::vector<int> Design::block_ids() const {
  std::vector<int> ids;
  for (const auto& m : modules) {
    for (const auto& b : m.blocks) ids.push_back(b.id);
  }
  return ids;
}

Design parse_netlist(std::string_view text) {
  Design design;
  int next_net = 0;
  int next_block = 0;
  std::optional<ModuleBuilder> current;
  int last_line = 0;
  for (const auto& line : tokenize(text)) {
    last_line = line.number;
    const auto& kw = line.tokens[0];
    if (kw.text == "module") {
      if (current) throw SyntaxError(line.number, kw.column, "nested module (missing 'end')");
      if (line.tokens.size() != 2) throw SyntaxError(line.number, kw.column, "expected: module <name>");
      const auto& name = line.tokens[1].text;
      if (!valid_name(name)) throw SyntaxError(line.number, line.tokens[1].column, "bad module name");
      if (design.find_module(name)) throw SyntaxError(line.number, line.tokens[1].column, "module '" + name + "' defined twice");
      current.emplace(name, line.number, next_net, next_block);
      continue;
    }
    if (!current) throw SyntaxError(line.number, kw.column, "'" + kw.text + "' outside a module");
    if (kw.text == "wire") current->add_wire(line);
    else if (kw.text == "block") current->add_block(line);
    else if (kw.text == "table") current->add_table(line);
    else if (kw.text == "inst") current->add_inst(line);
    else if (kw.text == "end") {
      if (line.tokens.size() != 1) throw SyntaxError(line.number, line.tokens[1].column, "unexpected token after 'end'");
      design.modules.push_back(current->finish());
      current.reset();
    } else {
      throw SyntaxError(line.number, kw.column, "unknown statement '" + kw.text + "'");
    }
  }
  if (current) throw SyntaxError(last_line + 1, 1, "missing 'end'");
  if (design.modules.empty()) throw SyntaxError(1, 1, "no module defined");
  design.top = design.modules.front().name;
  return design;
}

Design load_netlist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open netlist " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

std::string print_design(const Design& design) {
  std::ostringstream os;
  for (const auto& m : design.modules) {
    os << "module " << m.name << '\n';
    for (const auto& n : m.nets) {
      const char* dir = n.dir == PortDir::kInput ? "input" : n.dir == PortDir::kOutput ? "output" : "internal";
      os << "  wire " << n.width << ' ' << dir << ' ' << n.name << '\n';
    }
    auto list = [&](const std::vector<Signal>& sigs) {
      std::string s;
      for (std::size_t i = 0; i < sigs.size(); ++i) s += (i ? "," : "") + m.signal_name(sigs[i]);
      return s;
    };
    for (const auto& b : m.blocks) {
      os << "  block " << to_string(b.kind) << ' ' << b.name << " in=" << list(b.inputs)
         << " out=" << list(b.outputs) << '\n';
      if (b.table) {
        const int digits = std::max(1, (b.table->num_outputs() + 3) / 4);
        os << "  table " << b.name << ' ';
        char buf[16];
        for (auto r : b.table->rows()) {
          std::snprintf(buf, sizeof buf, "%0*X", digits, r);
          os << buf;
        }
        os << '\n';
      }
    }
    for (const auto& inst : m.instances) {
      os << "  inst " << inst.cell << ' ' << inst.name;
      for (const auto& [pin, sig] : inst.pins) os << ' ' << pin << '=' << m.signal_name(sig);
      os << '\n';
    }
    os << "end\n";
  }
  return os.str();
}

int bit_fanout(const Module& module, Signal s) {
  int count = 0;
  for (const auto& b : module.blocks) count += static_cast<int>(std::count(b.inputs.begin(), b.inputs.end(), s));
  if (module.net(s.net).dir == PortDir::kOutput) ++count;
  return count;
}

int compute_fanout(const Design& design, int net_id) {
  for (const auto& m : design.modules) {
    if (m.nets.empty() || net_id < m.nets.front().id || net_id > m.nets.back().id) continue;
    const auto& n = m.net(net_id);
    int count = 0;
    for (const auto& b : m.blocks) {
      for (auto s : b.inputs) count += s.net == net_id;
    }
    if (n.dir == PortDir::kOutput) count += n.width;
    return count;
  }
  throw Error(ErrorKind::kValidation, "unknown net id " + std::to_string(net_id));
}

Cone extract_cone(const Design& design, std::span<const int> block_ids, int max_inputs) {
  if (max_inputs > kMaxTableInputs) {
    throw Error(ErrorKind::kValidation, "max_inputs is capped at 16");
  }
  if (block_ids.empty()) throw Error(ErrorKind::kValidation, "empty block set");
  const Module* module = nullptr;
  std::vector<const LogicBlock*> blocks;
  for (int id : block_ids) {
    auto [m, b] = design.find_block(id);
    if (module && m != module) throw Error(ErrorKind::kValidation, "cone spans several modules");
    module = m;
    if (b->is_sequential()) {
      throw Error(ErrorKind::kValidation, "cone contains state element " + b->name);
    }
    blocks.push_back(b);
  }
  std::set<Signal> internal;
  for (auto* b : blocks) internal.insert(b->outputs.begin(), b->outputs.end());

  Cone cone;
  std::set<Signal> seen_in;
  for (auto* b : blocks) {
    for (auto s : b->inputs) {
      if (!internal.count(s) && seen_in.insert(s).second) cone.inputs.push_back(s);
    }
  }
  if (static_cast<int>(cone.inputs.size()) > max_inputs) {
    throw Error(ErrorKind::kValidation,
                "cone has " + std::to_string(cone.inputs.size()) + " inputs, limit " + std::to_string(max_inputs));
  }
  std::set<int> in_set(block_ids.begin(), block_ids.end());
  std::map<Signal, int> readers_outside;
  std::map<Signal, int> readers_inside;
  for (const auto& b : module->blocks) {
    for (auto s : b.inputs) {
      if (!internal.count(s)) continue;
      (in_set.count(b.id) ? readers_inside : readers_outside)[s]++;
    }
  }
  for (auto* b : blocks) {
    for (auto s : b->outputs) {
      bool visible = readers_outside.count(s) || module->net(s.net).dir == PortDir::kOutput ||
                     !readers_inside.count(s);
      if (visible) cone.outputs.push_back(s);
    }
  }
  if (cone.outputs.size() > 32) throw Error(ErrorKind::kValidation, "cone has more than 32 outputs");

  // Topological order over the selected blocks.
  std::map<Signal, const LogicBlock*> driver;
  for (auto* b : blocks) {
    for (auto s : b->outputs) driver[s] = b;
  }
  std::vector<const LogicBlock*> order;
  std::set<const LogicBlock*> done, active;
  std::function<void(const LogicBlock*)> visit = [&](const LogicBlock* b) {
    if (done.count(b)) return;
    if (!active.insert(b).second) throw Error(ErrorKind::kValidation, "combinational cycle in cone");
    for (auto s : b->inputs) {
      if (auto it = driver.find(s); it != driver.end()) visit(it->second);
    }
    active.erase(b);
    done.insert(b);
    order.push_back(b);
  };
  for (auto* b : blocks) visit(b);

  const int n = static_cast<int>(cone.inputs.size());
  const std::size_t words = words_for_inputs(n);
  std::map<Signal, std::vector<std::uint64_t>> value;
  for (int i = 0; i < n; ++i) value[cone.inputs[i]] = input_column(n, i);
  std::vector<std::uint64_t> in, out;
  for (auto* b : order) {
    std::vector<std::vector<std::uint64_t>> res(b->outputs.size(), std::vector<std::uint64_t>(words));
    in.resize(b->inputs.size());
    out.resize(b->outputs.size());
    for (std::size_t w = 0; w < words; ++w) {
      for (std::size_t i = 0; i < b->inputs.size(); ++i) in[i] = value.at(b->inputs[i])[w];
      eval_block_word(*b, in, out);
      for (std::size_t j = 0; j < out.size(); ++j) res[j][w] = out[j] & (w + 1 == words ? row_mask(n) : ~std::uint64_t{0});
    }
    for (std::size_t j = 0; j < b->outputs.size(); ++j) value[b->outputs[j]] = std::move(res[j]);
  }
  std::vector<std::vector<std::uint64_t>> cols;
  for (auto s : cone.outputs) cols.push_back(value.at(s));
  cone.table = TruthTable::from_output_bits(n, cols);
  return cone;
}

TruthTable extract_truth_table(const Design& design, std::span<const int> block_ids, int max_inputs) {
  return extract_cone(design, block_ids, max_inputs).table;
}

}  // namespace scmap
