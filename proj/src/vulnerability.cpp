// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/vulnerability.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "scmap/error.hpp"

namespace scmap {

namespace {

std::string glob_to_regex(const std::string& glob) {
  std::string re;
  for (std::size_t i = 0; i < glob.size(); ++i) {
    const char c = glob[i];
    switch (c) {
      case '*': re += ".*"; break;
      case '?': re += '.'; break;
      case '[': {
        auto close = glob.find(']', i + 2);
        if (close == std::string::npos) throw Error(ErrorKind::kValidation, "invalid glob '" + glob + "': unterminated [");
        std::string body = glob.substr(i + 1, close - i - 1);
        if (!body.empty() && body[0] == '!') body[0] = '^';
        for (char b : body) {
          if (b == '\\' || b == '[') throw Error(ErrorKind::kValidation, "invalid glob '" + glob + "'");
        }
        re += '[' + body + ']';
        i = close;
        break;
      }
      case ']': throw Error(ErrorKind::kValidation, "invalid glob '" + glob + "': stray ]");
      default:
        if (std::string_view(".^$|()+{}\\").find(c) != std::string_view::npos) re += '\\';
        re += c;
    }
  }
  return re;
}

}  // namespace

Glob::Glob(std::string pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw Error(ErrorKind::kValidation, "empty glob");
  try {
    re_ = std::regex(glob_to_regex(pattern_), std::regex::ECMAScript);
  } catch (const std::regex_error&) {
    throw Error(ErrorKind::kValidation, "invalid glob '" + pattern_ + "'");
  }
}

bool Glob::matches(std::string_view text) const {
  return std::regex_match(text.begin(), text.end(), re_);
}

AnnotationSet load_annotations(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kValidation, std::string("annotation JSON: ") + e.what());
  }
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kValidation, "annotation schema: " + m); };
  if (!doc.is_object()) fail("document must be an object");
  for (auto& [key, v] : doc.items()) {
    if (key != "sensitive_nets" && key != "leaky_modules" && key != "intensive_blocks") fail("unknown key '" + key + "'");
  }
  AnnotationSet ann;
  if (doc.contains("sensitive_nets")) {
    if (!doc["sensitive_nets"].is_array()) fail("sensitive_nets must be an array");
    for (const auto& p : doc["sensitive_nets"]) {
      if (!p.is_string()) fail("sensitive_nets entries must be strings");
      ann.sensitive_nets.emplace_back(p.get<std::string>());
    }
  }
  if (doc.contains("leaky_modules")) {
    if (!doc["leaky_modules"].is_array()) fail("leaky_modules must be an array");
    for (const auto& m : doc["leaky_modules"]) {
      if (!m.is_string()) fail("leaky_modules entries must be strings");
      ann.leaky_modules.push_back(m.get<std::string>());
    }
  }
  if (doc.contains("intensive_blocks")) {
    if (!doc["intensive_blocks"].is_array()) fail("intensive_blocks must be an array");
    for (const auto& e : doc["intensive_blocks"]) {
      if (!e.is_object() || !e.contains("pattern") || !e["pattern"].is_string()) fail("intensive_blocks entries need a string \"pattern\"");
      IntensivePattern ip{Glob(e["pattern"].get<std::string>()), std::nullopt};
      if (e.contains("io")) {
        if (!e["io"].is_number_integer() || e["io"].get<long long>() < 1) fail("io counts must be integers >= 1");
        ip.io = e["io"].get<int>();
      }
      ann.intensive_blocks.push_back(std::move(ip));
    }
  }
  return ann;
}

AnnotationSet load_annotations_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open annotations " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_annotations(ss.str());
}

std::vector<VulnerabilityProfile> profile_blocks(const Design& design, const AnnotationSet& ann) {
  std::vector<VulnerabilityProfile> out;
  for (const auto& m : design.modules) {
    const bool leaky = std::find(ann.leaky_modules.begin(), ann.leaky_modules.end(), m.name) != ann.leaky_modules.end();
    std::map<int, bool> sensitive_net;
    for (const auto& n : m.nets) {
      sensitive_net[n.id] = std::any_of(ann.sensitive_nets.begin(), ann.sensitive_nets.end(),
                                        [&](const Glob& g) { return g.matches(n.name); });
    }
    for (const auto& b : m.blocks) {
      VulnerabilityProfile p;
      p.block_id = b.id;
      p.leaky = leaky;
      bool sv = leaky;
      for (auto s : b.inputs) sv = sv || sensitive_net[s.net];
      for (auto s : b.outputs) sv = sv || sensitive_net[s.net];
      p.sv = sv ? 1 : 0;
      p.io = b.kind == BlockKind::kTable ? static_cast<int>(b.table->num_rows()) : 1;
      for (const auto& ip : ann.intensive_blocks) {
        if (ip.pattern.matches(b.name)) {
          p.intensive = true;
          if (ip.io) p.io = *ip.io;
          break;
        }
      }
      for (auto s : b.outputs) p.f = std::max(p.f, bit_fanout(m, s));
      out.push_back(p);
    }
  }
  return out;
}

Partition partition(const Design& design, const std::vector<VulnerabilityProfile>& profiles, int fanout_threshold) {
  std::map<int, const VulnerabilityProfile*> by_id;
  for (const auto& p : profiles) by_id[p.block_id] = &p;
  Partition out;
  for (int id : design.block_ids()) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorKind::kValidation, "no profile for block " + std::to_string(id));
    const auto& p = *it->second;
    const bool vulnerable = p.sv == 1 || p.leaky || (p.intensive && p.io > 0) || p.f >= fanout_threshold;
    (vulnerable ? out.vulnerable : out.conventional).push_back(id);
  }
  return out;
}

}  // namespace scmap
