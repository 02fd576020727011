// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "scmap/error.hpp"
#include "scmap/netlist.hpp"
#include "scmap/vulnerability.hpp"
#include "test_util.hpp"

namespace scmap {
namespace {

using testing::data_path;

const VulnerabilityProfile& profile_of(const std::vector<VulnerabilityProfile>& ps, const Design& d,
                                       const std::string& name) {
  for (const auto& p : ps) {
    if (d.find_block(p.block_id).second->name == name) return p;
  }
  throw std::runtime_error("no block " + name);
}

TEST(Glob, Matching) {
  EXPECT_TRUE(Glob("round_key*").matches("round_key_0"));
  EXPECT_TRUE(Glob("round_key*").matches("round_key"));
  EXPECT_FALSE(Glob("round_key*").matches("key"));
  EXPECT_TRUE(Glob("k?y").matches("key"));
  EXPECT_TRUE(Glob("x[0-3]").matches("x2"));
  EXPECT_FALSE(Glob("x[0-3]").matches("x7"));
  EXPECT_TRUE(Glob("a.b").matches("a.b"));
  EXPECT_FALSE(Glob("a.b").matches("axb"));
  EXPECT_THROW(Glob("["), Error);
}

TEST(Annotations, Load) {
  const auto a = load_annotations(R"({"sensitive_nets":["round_key*"]})");
  ASSERT_EQ(a.sensitive_nets.size(), 1u);
  EXPECT_TRUE(a.leaky_modules.empty());
  const auto e = load_annotations("{}");
  EXPECT_TRUE(e.sensitive_nets.empty());
  EXPECT_TRUE(e.intensive_blocks.empty());
  EXPECT_THROW(load_annotations(R"({"sensitive_nets":["["]})"), Error);
  EXPECT_THROW(load_annotations(R"({"bogus":1})"), Error);
  EXPECT_THROW(load_annotations("[1,2"), Error);
  EXPECT_THROW(load_annotations(R"({"intensive_blocks":[{"pattern":"s*","io":0}]})"), Error);
  const auto i = load_annotations(R"({"intensive_blocks":[{"pattern":"s*","io":7}]})");
  ASSERT_EQ(i.intensive_blocks.size(), 1u);
  EXPECT_EQ(i.intensive_blocks[0].io, 7);
}

TEST(Profile, SensitiveNetSetsSv) {
  const Design d = parse_netlist(R"(module m
  wire 1 input round_key_0
  wire 1 input d
  wire 1 output y
  wire 1 output z
  block xor x in=round_key_0,d out=y
  block not n in=d out=z
end
)");
  const auto ann = load_annotations(R"({"sensitive_nets":["round_key*"]})");
  const auto ps = profile_blocks(d, ann);
  EXPECT_EQ(profile_of(ps, d, "x").sv, 1);
  EXPECT_EQ(profile_of(ps, d, "n").sv, 0);
  EXPECT_EQ(profile_of(ps, d, "x").io, 1);
}

TEST(Profile, FanoutIsMaxOverOutputs) {
  const Design d = parse_netlist(R"(module m
  wire 1 input a
  wire 1 input b
  wire 1 internal w
  wire 4 output y
  block and src in=a,b out=w
  block not n0 in=w out=y[0]
  block not n1 in=w out=y[1]
  block not n2 in=w out=y[2]
  block not n3 in=w out=y[3]
end
)");
  const auto ps = profile_blocks(d, {});
  EXPECT_EQ(profile_of(ps, d, "src").f, 4);
  EXPECT_EQ(profile_of(ps, d, "n0").f, 1);
}

TEST(Profile, TableIoCountsEntries) {
  const Design d = load_netlist(data_path("fixtures/aes_sbox8.net"));
  const auto ps = profile_blocks(d, {});
  EXPECT_EQ(profile_of(ps, d, "sbox").io, 256);
  const auto ann = load_annotations(R"({"intensive_blocks":[{"pattern":"sbox","io":9}]})");
  const auto pa = profile_blocks(d, ann);
  EXPECT_EQ(profile_of(pa, d, "sbox").io, 9);
  EXPECT_TRUE(profile_of(pa, d, "sbox").intensive);
}

TEST(Profile, LeakyModule) {
  const Design d = parse_netlist(R"(module top
  wire 1 input a
  wire 1 input b
  wire 1 output y
  block and g in=a,b out=y
end
module leaky_sub
  wire 1 input a
  wire 1 output y
  block not n in=a out=y
end
)");
  const auto ann = load_annotations(R"({"leaky_modules":["leaky_sub"]})");
  const auto ps = profile_blocks(d, ann);
  EXPECT_TRUE(profile_of(ps, d, "n").leaky);
  EXPECT_EQ(profile_of(ps, d, "n").sv, 1);
  EXPECT_FALSE(profile_of(ps, d, "g").leaky);
  const auto part = partition(d, ps);
  EXPECT_EQ(part.vulnerable.size(), 1u);
}

TEST(Partition, EmptyWithoutAnnotations) {
  const Design d = load_netlist(data_path("fixtures/full_adder.net"));
  const auto ps = profile_blocks(d, {});
  const auto part = partition(d, ps);
  EXPECT_TRUE(part.vulnerable.empty());
  EXPECT_EQ(part.conventional.size(), d.block_ids().size());
}

TEST(Partition, HalfAdderSumSensitive) {
  const Design d = load_netlist(data_path("fixtures/half_adder.net"));
  const auto ann = load_annotations_file(data_path("fixtures/half_adder.ann.json"));
  const auto part = partition(d, profile_blocks(d, ann));
  ASSERT_EQ(part.vulnerable.size(), 1u);
  EXPECT_EQ(d.find_block(part.vulnerable[0]).second->name, "sum_xor");
  ASSERT_EQ(part.conventional.size(), 1u);
  EXPECT_EQ(d.find_block(part.conventional[0]).second->name, "carry_and");
}

TEST(Partition, FanoutThreshold) {
  const Design d = parse_netlist(R"(module m
  wire 1 input a
  wire 1 input b
  wire 1 internal w
  wire 4 output y
  block and src in=a,b out=w
  block not n0 in=w out=y[0]
  block not n1 in=w out=y[1]
  block not n2 in=w out=y[2]
  block not n3 in=w out=y[3]
end
)");
  const auto ps = profile_blocks(d, {});
  EXPECT_EQ(partition(d, ps, 4).vulnerable.size(), 1u);
  EXPECT_EQ(partition(d, ps, 5).vulnerable.size(), 0u);
}

// Every block touching a key net is vulnerable; checked by walking the
// blocks' pins directly.
TEST(Partition, KeyTouchingBlocksAreVulnerable) {
  const Design d = load_netlist(data_path("fixtures/present_round.net"));
  const auto ann = load_annotations(R"({"sensitive_nets":["key*"]})");
  const auto part = partition(d, profile_blocks(d, ann));
  const std::set<int> vuln(part.vulnerable.begin(), part.vulnerable.end());
  const Module& m = d.top_module();
  int touching = 0;
  for (const auto& b : m.blocks) {
    bool key = false;
    for (const auto& s : b.inputs) key |= m.net(s.net).name == "key";
    for (const auto& s : b.outputs) key |= m.net(s.net).name == "key";
    if (key) {
      ++touching;
      EXPECT_TRUE(vuln.count(b.id)) << b.name;
    }
  }
  EXPECT_EQ(touching, 64);
  EXPECT_EQ(part.vulnerable.size() + part.conventional.size(), d.block_ids().size());
}

}  // namespace
}  // namespace scmap
