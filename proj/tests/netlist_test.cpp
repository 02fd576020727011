// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "scmap/error.hpp"
#include "scmap/netlist.hpp"
#include "test_util.hpp"

namespace scmap {
namespace {

using testing::data_path;

constexpr const char* kHalfAdder = R"(module half_adder
  wire 1 input a
  wire 1 input b
  wire 1 output sum
  wire 1 output carry
  block xor sum_xor in=a,b out=sum
  block and carry_and in=a,b out=carry
end
)";

int block_count(const Design& d) {
  int n = 0;
  for (const auto& m : d.modules) n += static_cast<int>(m.blocks.size());
  return n;
}

TEST(Netlist, ParsesHalfAdder) {
  const Design d = parse_netlist(kHalfAdder);
  ASSERT_EQ(d.modules.size(), 1u);
  EXPECT_EQ(d.top, "half_adder");
  EXPECT_EQ(block_count(d), 2);
  const Module& m = d.top_module();
  ASSERT_EQ(m.nets.size(), 4u);
  for (const auto& n : m.nets) EXPECT_EQ(n.width, 1);
  EXPECT_EQ(m.blocks[0].kind, BlockKind::kXor);
  EXPECT_EQ(m.blocks[1].kind, BlockKind::kAnd);
}

TEST(Netlist, EmptyModuleIsValid) {
  const Design d = parse_netlist("module empty\nend\n");
  EXPECT_EQ(block_count(d), 0);
  EXPECT_TRUE(d.block_ids().empty());
}

TEST(Netlist, UndeclaredNetIsSyntaxError) {
  const char* src = R"(module m
  wire 1 input a
  wire 1 output y
  block and g in=a,c out=y
end
)";
  try {
    parse_netlist(src);
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_GT(e.column(), 1);
    EXPECT_NE(std::string(e.what()).find('c'), std::string::npos);
  }
}

TEST(Netlist, RejectsMalformedInput) {
  EXPECT_THROW(parse_netlist("wire 1 input a\n"), SyntaxError);
  EXPECT_THROW(parse_netlist("module m\n  wire 0 input a\nend\n"), SyntaxError);
  EXPECT_THROW(parse_netlist("module m\n  frob x\nend\n"), SyntaxError);
  EXPECT_THROW(parse_netlist("module m\n  wire 1 input a\n"), SyntaxError);
  EXPECT_THROW(parse_netlist("module m\n  wire 1 input a\n  wire 1 output y\n"
                             "  block not n in=a,a out=y\nend\n"),
               SyntaxError);
}

TEST(Netlist, MultipleDriversAreRejected) {
  const char* src = R"(module m
  wire 1 input a
  wire 1 input b
  wire 1 output y
  block and g1 in=a,b out=y
  block or g2 in=a,b out=y
end
)";
  try {
    parse_netlist(src);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(Netlist, CombinationalLoopIsRejected) {
  const char* src = R"(module m
  wire 1 input a
  wire 1 internal p
  wire 1 output y
  block and g1 in=a,y out=p
  block not g2 in=p out=y
end
)";
  EXPECT_THROW(parse_netlist(src), Error);
}

TEST(Netlist, MultiBitBlocksAreBitBlasted) {
  const char* src = R"(module m
  wire 4 input a
  wire 4 input b
  wire 4 output y
  block xor x in=a,b out=y
end
)";
  const Design d = parse_netlist(src);
  const Module& m = d.top_module();
  ASSERT_EQ(m.blocks.size(), 4u);
  EXPECT_EQ(m.blocks[0].name, "x[0]");
  EXPECT_EQ(m.blocks[3].name, "x[3]");
  EXPECT_EQ(m.blocks[2].inputs[0].bit, 2);
}

TEST(Netlist, FanoutCountsReaders) {
  const char* src = R"(module m
  wire 1 input d
  wire 1 input e
  wire 1 input u
  wire 4 output y
  block xor x0 in=d,e out=y[0]
  block xor x1 in=d,e out=y[1]
  block xor x2 in=d,e out=y[2]
  block xor x3 in=d,e out=y[3]
end
)";
  const Design d = parse_netlist(src);
  const Module& m = d.top_module();
  EXPECT_EQ(compute_fanout(d, *m.find_net("d")), 4);
  EXPECT_EQ(compute_fanout(d, *m.find_net("u")), 0);
}

TEST(Netlist, SharedOperandFansOutTwice) {
  const char* src = R"(module mix
  wire 1 input data_in0
  wire 1 input data_in1
  wire 1 input data_in2
  wire 1 output o0
  wire 1 output o1
  block xor m0 in=data_in0,data_in1 out=o0
  block xor m1 in=data_in0,data_in2 out=o1
end
)";
  const Design d = parse_netlist(src);
  EXPECT_EQ(compute_fanout(d, *d.top_module().find_net("data_in0")), 2);
}

TEST(Netlist, BlockFunctions) {
  const Design d = parse_netlist(kHalfAdder);
  const TruthTable x = block_function(d.top_module().blocks[0]);
  EXPECT_EQ(x, TruthTable(2, 1, {0, 1, 1, 0}));
  const TruthTable a = block_function(d.top_module().blocks[1]);
  EXPECT_EQ(a, TruthTable(2, 1, {0, 0, 0, 1}));
}

TEST(Netlist, HalfAdderConeTable) {
  const Design d = parse_netlist(kHalfAdder);
  const Cone cone = extract_cone(d, d.block_ids());
  ASSERT_EQ(cone.inputs.size(), 2u);
  ASSERT_EQ(cone.outputs.size(), 2u);
  const Module& m = d.top_module();
  EXPECT_EQ(m.signal_name(cone.outputs[0]), "sum");
  EXPECT_EQ(m.signal_name(cone.outputs[1]), "carry");
  // Output 0 is sum, output 1 is carry.
  EXPECT_EQ(cone.table, TruthTable(2, 2, {0b00, 0b01, 0b01, 0b10}));
}

TEST(Netlist, SboxTableMatchesStoredEntries) {
  const Design d = load_netlist(data_path("fixtures/present_sbox4.net"));
  const std::vector<std::uint32_t> sbox{0xC, 5, 6, 0xB, 9, 0, 0xA, 0xD, 3, 0xE, 0xF, 8, 4, 7, 1, 2};
  for (const auto& b : d.top_module().blocks) {
    if (b.kind != BlockKind::kTable) continue;
    EXPECT_EQ(block_function(b), TruthTable(4, 4, sbox));
    const int id = b.id;
    EXPECT_EQ(extract_truth_table(d, std::span(&id, 1)), TruthTable(4, 4, sbox));
  }
}

TEST(Netlist, ConeWiderThanLimitIsRejected) {
  const Design d = load_netlist(data_path("fixtures/present_round.net"));
  std::vector<int> ids;
  for (const auto& b : d.top_module().blocks) {
    if (!b.is_sequential()) ids.push_back(b.id);
  }
  EXPECT_THROW(extract_cone(d, ids, 10), Error);
}

TEST(Netlist, ConeWithRegisterIsRejected) {
  const Design d = load_netlist(data_path("fixtures/present_sbox4.net"));
  EXPECT_THROW(extract_cone(d, d.block_ids()), Error);
}

TEST(Netlist, AddAndMuxSemantics) {
  const char* src = R"(module m
  wire 2 input a
  wire 2 input b
  wire 1 input s
  wire 3 output sum
  wire 2 output pick
  block add adder in=a,b out=sum
  block mux sel in=s,a,b out=pick
end
)";
  const Design d = parse_netlist(src);
  std::vector<int> adder, mux;
  for (const auto& b : d.top_module().blocks) {
    (b.name.rfind("adder", 0) == 0 ? adder : mux).push_back(b.id);
  }
  const Cone c = extract_cone(d, adder);
  const Module& m = d.top_module();
  // Exhaustive check of a + b against the cone, whatever its input order.
  for (std::size_t r = 0; r < c.table.num_rows(); ++r) {
    unsigned a = 0, b = 0;
    for (std::size_t i = 0; i < c.inputs.size(); ++i) {
      if (!(r >> i & 1)) continue;
      const auto& s = c.inputs[i];
      (m.net(s.net).name == "a" ? a : b) |= 1u << s.bit;
    }
    unsigned got = 0;
    for (std::size_t j = 0; j < c.outputs.size(); ++j) {
      if (c.table.bit(r, static_cast<int>(j))) got |= 1u << c.outputs[j].bit;
    }
    EXPECT_EQ(got, a + b) << "row " << r;
  }
  const Cone cm = extract_cone(d, mux);
  for (std::size_t r = 0; r < cm.table.num_rows(); ++r) {
    unsigned a = 0, b = 0, s = 0;
    for (std::size_t i = 0; i < cm.inputs.size(); ++i) {
      if (!(r >> i & 1)) continue;
      const auto& sig = cm.inputs[i];
      const auto& name = m.net(sig.net).name;
      if (name == "s") s = 1;
      else (name == "a" ? a : b) |= 1u << sig.bit;
    }
    unsigned got = 0;
    for (std::size_t j = 0; j < cm.outputs.size(); ++j) {
      if (cm.table.bit(r, static_cast<int>(j))) got |= 1u << cm.outputs[j].bit;
    }
    EXPECT_EQ(got, s ? b : a) << "row " << r;
  }
}

TEST(Netlist, PrintParseRoundTrip) {
  for (const char* f : {"half_adder", "full_adder", "present_sbox4", "aes_sbox8", "present_round"}) {
    const Design d = load_netlist(data_path(std::string("fixtures/") + f + ".net"));
    const std::string text = print_design(d);
    const Design again = parse_netlist(text);
    EXPECT_EQ(print_design(again), text) << f;
    EXPECT_EQ(again.block_ids().size(), d.block_ids().size()) << f;
  }
}

TEST(Netlist, FanoutSumsMatchPinCount) {
  for (const char* f : {"half_adder", "full_adder", "present_sbox4", "present_round"}) {
    const Design d = load_netlist(data_path(std::string("fixtures/") + f + ".net"));
    const Module& m = d.top_module();
    int pins = 0;
    for (const auto& b : m.blocks) pins += static_cast<int>(b.inputs.size());
    for (const auto& n : m.nets) {
      if (n.dir == PortDir::kOutput) pins += n.width;
    }
    int total = 0;
    for (const auto& n : m.nets) total += compute_fanout(d, n.id);
    EXPECT_EQ(total, pins) << f;
  }
}

TEST(Netlist, MultipleTableLinesConcatenate) {
  const char* src = R"(module m
  wire 2 input a
  wire 1 output y
  block table t in=a out=y
  table t 01
  table t 10
end
)";
  const Design d = parse_netlist(src);
  EXPECT_EQ(block_function(d.top_module().blocks[0]), TruthTable(2, 1, {0, 1, 1, 0}));
}

TEST(Netlist, TableWithWrongEntryCountIsRejected) {
  const char* src = R"(module m
  wire 2 input a
  wire 1 output y
  block table t in=a out=y
  table t 011
end
)";
  EXPECT_THROW(parse_netlist(src), SyntaxError);
}

}  // namespace
}  // namespace scmap
