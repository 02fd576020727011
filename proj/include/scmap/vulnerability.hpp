// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "scmap/netlist.hpp"

namespace scmap {

/// Shell-style pattern (`*`, `?`, `[...]`) compiled to a regex.
class Glob {
 public:
  explicit Glob(std::string pattern);
  const std::string& pattern() const noexcept { return pattern_; }
  bool matches(std::string_view text) const;

 private:
  std::string pattern_;
  std::regex re_;
};

struct IntensivePattern {
  Glob pattern;
  std::optional<int> io;
};

struct AnnotationSet {
  std::vector<Glob> sensitive_nets;
  std::vector<std::string> leaky_modules;
  std::vector<IntensivePattern> intensive_blocks;
};

AnnotationSet load_annotations(std::string_view json_text);
AnnotationSet load_annotations_file(const std::string& path);

inline constexpr int kDefaultFanoutThreshold = 4;

struct VulnerabilityProfile {
  int block_id = 0;
  int sv = 0;
  int io = 0;
  int f = 0;
  bool leaky = false;
  bool intensive = false;  // matched an intensive_blocks pattern
};

/// One profile per block, in design block order.
std::vector<VulnerabilityProfile> profile_blocks(const Design& design,
                                                 const AnnotationSet& ann);

struct Partition {
  std::vector<int> vulnerable;
  std::vector<int> conventional;
};

Partition partition(const Design& design,
                    const std::vector<VulnerabilityProfile>& profiles,
                    int fanout_threshold = kDefaultFanoutThreshold);

}  // namespace scmap
