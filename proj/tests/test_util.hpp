// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scmap/cell_library.hpp"

namespace scmap::testing {

inline std::string data_path(std::string_view rel) {
  return std::string(SCMAP_DATA_DIR) + "/" + std::string(rel);
}

struct CellSpec {
  std::string name;
  std::vector<std::string> inputs;
  std::string function;
  double ds = 1.0;
  double cap = 1.0;
  double area = 1.0;
  bool sequential = false;
};

inline std::string library_json(const std::vector<CellSpec>& cells,
                                const std::string& name = "test") {
  nlohmann::json doc;
  doc["name"] = name;
  doc["node_label"] = "test";
  doc["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    doc["cells"].push_back({{"name", c.name},
                            {"inputs", c.inputs},
                            {"output", c.sequential ? "q" : "y"},
                            {"function", c.function},
                            {"ds", c.ds},
                            {"cap", c.cap},
                            {"area", c.area},
                            {"sequential", c.sequential}});
  }
  return doc.dump();
}

inline CellLibrary make_library(const std::vector<CellSpec>& cells,
                                const std::string& name = "test") {
  return parse_library(library_json(cells, name));
}

/// INV, AND2, OR2 and a flop: the smallest complete library.
inline std::vector<CellSpec> minimal_cells() {
  return {{"INV_X1", {"a"}, "!a", 1.0, 1.0, 1.0},
          {"AND2_X1", {"a", "b"}, "a&b", 1.0, 1.9, 1.67},
          {"OR2_X1", {"a", "b"}, "a|b", 1.0, 1.9, 1.67},
          {"DFF_X1", {"d"}, "d", 1.0, 1.0, 4.67, true}};
}

}  // namespace scmap::testing
