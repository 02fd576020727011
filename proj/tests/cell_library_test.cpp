// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "scmap/cell_library.hpp"
#include "scmap/error.hpp"
#include "test_util.hpp"

namespace scmap {
namespace {

using testing::CellSpec;
using testing::data_path;
using testing::make_library;
using testing::minimal_cells;

TEST(CellLibrary, LoadsDriveFamily) {
  auto cells = minimal_cells();
  cells[1] = {"AND2_X1", {"a", "b"}, "a&b", 1.0, 1.0, 1.0};
  cells.push_back({"AND2_X2", {"a", "b"}, "a&b", 2.0, 1.8, 1.5});
  const CellLibrary lib = make_library(cells);
  int ands = 0;
  for (const auto& c : lib.cells()) {
    if (c.name.rfind("AND2", 0) == 0) ++ands;
  }
  EXPECT_EQ(ands, 2);
  const auto s = scalar_attributes(lib.at("AND2_X2"));
  EXPECT_DOUBLE_EQ(s.ds, 2.0);
  EXPECT_DOUBLE_EQ(s.cap, 1.8);
  EXPECT_EQ(lib.same_function(*lib.find("AND2_X1")).size(), 2u);
}

TEST(CellLibrary, ZeroDriveIsRejected) {
  auto cells = minimal_cells();
  cells[0].ds = 0.0;
  EXPECT_THROW(make_library(cells), Error);
}

TEST(CellLibrary, MissingPrimitivesAreReported) {
  // No NOT cell and no XOR: only AND, OR and a flop.
  std::vector<CellSpec> cells{{"AND2_X1", {"a", "b"}, "a&b"},
                              {"OR2_X1", {"a", "b"}, "a|b"},
                              {"DFF_X1", {"d"}, "d", 1, 1, 4, true}};
  try {
    make_library(cells);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("NOT"), std::string::npos);
  }
}

TEST(CellLibrary, FlopIsRequired) {
  auto cells = minimal_cells();
  cells.pop_back();
  EXPECT_THROW(make_library(cells), Error);
}

TEST(CellLibrary, DriveFamilyOrderingIsEnforced) {
  auto cells = minimal_cells();
  cells.push_back({"INV_X2", {"a"}, "!a", 0.5, 1.8, 1.3});
  EXPECT_THROW(make_library(cells), Error);
}

TEST(CellLibrary, DuplicateNamesAreRejected) {
  auto cells = minimal_cells();
  cells.push_back(cells[0]);
  EXPECT_THROW(make_library(cells), Error);
}

TEST(CellLibrary, MalformedJsonIsRejected) {
  EXPECT_THROW(parse_library("{"), Error);
  EXPECT_THROW(parse_library(R"({"name": "x"})"), Error);
  auto cells = minimal_cells();
  cells[1].function = "a & (b";
  EXPECT_THROW(make_library(cells), Error);
  cells[1].function = "a & c";
  EXPECT_THROW(make_library(cells), Error);
}

TEST(CellLibrary, TruthTables) {
  const CellSpec nand{"NAND2_X1", {"a", "b"}, "!(a&b)"};
  const CellSpec inv{"INV_X1", {"a"}, "!a"};
  const CellSpec aoi{"AOI21_X1", {"c", "b", "a"}, "!((a&b)|c)"};
  auto cells = minimal_cells();
  cells.push_back(nand);
  cells.push_back(aoi);
  const CellLibrary lib = make_library(cells);
  EXPECT_EQ(cell_truth_table(lib.at("NAND2_X1")), TruthTable(2, 1, {1, 1, 1, 0}));
  EXPECT_EQ(cell_truth_table(lib.at("INV_X1")), TruthTable(1, 1, {1, 0}));
  EXPECT_EQ(cell_truth_table(lib.at("AOI21_X1")), TruthTable(3, 1, {1, 0, 1, 0, 1, 0, 0, 0}));
  for (const auto& c : lib.cells()) {
    if (c.is_sequential) continue;
    EXPECT_EQ(cell_truth_table(c).num_rows(), std::size_t{1} << c.inputs.size());
  }
}

TEST(CellLibrary, ExpressionPrecedence) {
  const std::vector<std::string> pins{"a", "b", "c"};
  // `!` binds tightest, then `&`, `^`, `|`.
  const BoolExpr e = BoolExpr::parse("a|b&!c^1", pins);
  for (unsigned r = 0; r < 8; ++r) {
    const bool a = r & 1, b = r >> 1 & 1, c = r >> 2 & 1;
    const std::uint64_t in[3] = {a ? ~0ULL : 0, b ? ~0ULL : 0, c ? ~0ULL : 0};
    const bool want = a || ((b && !c) != true);
    EXPECT_EQ(e.eval(in) & 1, want ? 1u : 0u) << r;
  }
}

TEST(CellLibrary, MatchReportsPermutation) {
  auto cells = minimal_cells();
  cells.push_back({"ANDN_X1", {"a", "b"}, "a&!b"});
  const CellLibrary lib = make_library(cells);
  // Target: x0 & !x1 reversed, i.e. !x0 & x1.
  const TruthTable target(2, 1, {0, 0, 1, 0});
  const auto ms = lib.match(target);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(lib.cell(ms[0].cell).name, "ANDN_X1");
  EXPECT_EQ(ms[0].perm, (std::vector<int>{1, 0}));
}

TEST(CellLibrary, FixtureLibraries) {
  const struct {
    const char* file;
    int cells;
    const char* label;
  } want[] = {{"libs/fixture65.json", 216, "fixture-65"},
              {"libs/fixture45.json", 134, "fixture-45"},
              {"libs/fixture15.json", 76, "fixture-15"}};
  for (const auto& w : want) {
    const CellLibrary lib = load_library(data_path(w.file));
    EXPECT_EQ(lib.size(), w.cells) << w.file;
    EXPECT_EQ(lib.node_label(), w.label);
    for (const auto& c : lib.cells()) {
      EXPECT_GT(c.ds, 0.0);
      EXPECT_GT(c.cap, 0.0);
    }
    EXPECT_TRUE(lib.cell(lib.default_flop()).is_sequential);
  }
}

TEST(CellLibrary, MissingFileIsIoError) {
  try {
    load_library("/nonexistent/lib.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace scmap
