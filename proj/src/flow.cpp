// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/flow.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "scmap/emit.hpp"
#include "scmap/error.hpp"

namespace scmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::uint64_t width_mask(int width) {
  return width >= 64 ? ~0ULL : ((1ULL << width) - 1);
}

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorKind::kValidation, "config: " + msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      invalid("unknown key " + where + "." + k);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    invalid(where + "." + key + " has the wrong type");
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = fs::path(base) / path;
  return path.lexically_normal().string();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.output_dir) / name).string();
}

void check_design_choice(const std::string& design) {
  if (design != "conventional" && design != "posyn")
    throw Error(ErrorKind::kValidation, "design must be conventional or posyn, got " + design);
}

int port_width(const Design& d, const std::string& port) {
  const Module& top = d.top_module();
  auto id = top.find_net(port);
  if (!id || top.net(*id).dir != PortDir::kInput)
    throw Error(ErrorKind::kValidation, "no input port " + port);
  return top.net(*id).width;
}

}  // namespace

SboxTarget AttackConfig::target() const {
  if (sbox == "present") return present_target(subkey);
  if (sbox == "aes") return aes_target(subkey);
  throw Error(ErrorKind::kValidation, "attack.sbox must be present or aes");
}

void RunConfig::validate() const {
  weights.validate();
  sa.validate();
  model.validate();
  if (fanout_threshold < 1) invalid("fanout_threshold must be >= 1");
  if (!std::isfinite(min_ds) || min_ds < 0) invalid("min_ds must be >= 0");
  if (attack.num_traces < 2) invalid("attack.num_traces must be >= 2");
  if (attack.attempts < 0) invalid("attack.attempts must be >= 0");
  if (!(attack.threshold > 0)) invalid("attack.threshold must be > 0");
  if (attack.dpa_bit < 0) invalid("attack.dpa_bit must be >= 0");
  (void)attack.target();
  if (attack.dpa_bit >= attack.target().bits) invalid("attack.dpa_bit exceeds sbox width");
  if (mi.samples < 1 || mi.bins < 1) invalid("mi.samples and mi.bins must be >= 1");
  if (gridsearch.grid.empty()) invalid("gridsearch.grid must be non-empty");
  for (double g : gridsearch.grid) {
    if (!std::isfinite(g) || g < 0) invalid("gridsearch.grid values must be finite and >= 0");
  }
  if (gridsearch.num_traces < 2) invalid("gridsearch.num_traces must be >= 2");
}

RunConfig parse_run_config(const json& doc, const std::string& base_dir) {
  check_keys(doc, "config",
             {"netlist", "library", "annotations", "output_dir", "seed", "mode",
              "fanout_threshold", "min_ds", "weights", "sa", "model", "attack", "mi",
              "gridsearch"});
  RunConfig cfg;
  read(doc, "netlist", cfg.netlist, "config");
  read(doc, "library", cfg.library, "config");
  read(doc, "annotations", cfg.annotations, "config");
  read(doc, "output_dir", cfg.output_dir, "config");
  if (cfg.netlist.empty()) invalid("netlist is required");
  if (cfg.library.empty()) invalid("library is required");
  if (cfg.output_dir.empty()) invalid("output_dir is required");
  cfg.netlist = resolve(base_dir, cfg.netlist);
  cfg.library = resolve(base_dir, cfg.library);
  if (!cfg.annotations.empty()) cfg.annotations = resolve(base_dir, cfg.annotations);
  cfg.output_dir = resolve(base_dir, cfg.output_dir);
  for (const auto* p : {&cfg.netlist, &cfg.library, &cfg.annotations}) {
    if (!p->empty() && !fs::is_regular_file(*p)) throw Error(ErrorKind::kIo, "config: no such file " + *p);
  }

  read(doc, "seed", cfg.seed, "config");
  if (auto it = doc.find("mode"); it != doc.end()) {
    if (!it->is_string()) invalid("mode must be a string");
    cfg.mode = parse_solve_mode(it->get<std::string>());
  }
  read(doc, "fanout_threshold", cfg.fanout_threshold, "config");
  read(doc, "min_ds", cfg.min_ds, "config");

  if (auto it = doc.find("weights"); it != doc.end()) {
    check_keys(*it, "weights", {"alpha", "beta", "gamma"});
    read(*it, "alpha", cfg.weights.alpha, "weights");
    read(*it, "beta", cfg.weights.beta, "weights");
    read(*it, "gamma", cfg.weights.gamma, "weights");
  }
  if (auto it = doc.find("sa"); it != doc.end()) {
    check_keys(*it, "sa",
               {"initial_temp", "cooling_rate", "iterations", "max_cells", "keep_top_k",
                "w_area", "w_power"});
    read(*it, "initial_temp", cfg.sa.initial_temp, "sa");
    read(*it, "cooling_rate", cfg.sa.cooling_rate, "sa");
    read(*it, "iterations", cfg.sa.iterations, "sa");
    read(*it, "max_cells", cfg.sa.max_cells, "sa");
    read(*it, "keep_top_k", cfg.sa.keep_top_k, "sa");
    read(*it, "w_area", cfg.sa.w_area, "sa");
    read(*it, "w_power", cfg.sa.w_power, "sa");
  }
  if (auto it = doc.find("model"); it != doc.end()) {
    check_keys(*it, "model", {"w_cap", "w_ds", "static_w", "noise_sigma", "cycles"});
    read(*it, "w_cap", cfg.model.w_cap, "model");
    read(*it, "w_ds", cfg.model.w_ds, "model");
    read(*it, "static_w", cfg.model.static_w, "model");
    read(*it, "noise_sigma", cfg.model.noise_sigma, "model");
    read(*it, "cycles", cfg.model.cycles, "model");
  }
  if (auto it = doc.find("attack"); it != doc.end()) {
    check_keys(*it, "attack",
               {"num_traces", "attempts", "threshold", "sbox", "subkey", "dpa_bit",
                "fixed_plaintext", "plaintext_port", "key_port"});
    read(*it, "num_traces", cfg.attack.num_traces, "attack");
    read(*it, "attempts", cfg.attack.attempts, "attack");
    read(*it, "threshold", cfg.attack.threshold, "attack");
    read(*it, "sbox", cfg.attack.sbox, "attack");
    read(*it, "subkey", cfg.attack.subkey, "attack");
    read(*it, "dpa_bit", cfg.attack.dpa_bit, "attack");
    read(*it, "fixed_plaintext", cfg.attack.fixed_plaintext, "attack");
    read(*it, "plaintext_port", cfg.attack.ports.plaintext, "attack");
    read(*it, "key_port", cfg.attack.ports.key, "attack");
  }
  if (auto it = doc.find("mi"); it != doc.end()) {
    check_keys(*it, "mi", {"samples", "bins"});
    read(*it, "samples", cfg.mi.samples, "mi");
    read(*it, "bins", cfg.mi.bins, "mi");
  }
  if (auto it = doc.find("gridsearch"); it != doc.end()) {
    check_keys(*it, "gridsearch", {"grid", "attempts", "num_traces"});
    read(*it, "grid", cfg.gridsearch.grid, "gridsearch");
    read(*it, "attempts", cfg.gridsearch.attempts, "gridsearch");
    read(*it, "num_traces", cfg.gridsearch.num_traces, "gridsearch");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSyntax, path + ": " + e.what());
  }
  return parse_run_config(doc, fs::path(path).parent_path().string());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["netlist"] = cfg.netlist;
  j["library"] = cfg.library;
  if (!cfg.annotations.empty()) j["annotations"] = cfg.annotations;
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  j["mode"] = std::string(to_string(cfg.mode));
  j["fanout_threshold"] = cfg.fanout_threshold;
  j["min_ds"] = cfg.min_ds;
  j["weights"] = {{"alpha", cfg.weights.alpha}, {"beta", cfg.weights.beta}, {"gamma", cfg.weights.gamma}};
  j["sa"] = {{"initial_temp", cfg.sa.initial_temp}, {"cooling_rate", cfg.sa.cooling_rate},
             {"iterations", cfg.sa.iterations},     {"max_cells", cfg.sa.max_cells},
             {"keep_top_k", cfg.sa.keep_top_k},     {"w_area", cfg.sa.w_area},
             {"w_power", cfg.sa.w_power}};
  j["model"] = {{"w_cap", cfg.model.w_cap},
                {"w_ds", cfg.model.w_ds},
                {"static_w", cfg.model.static_w},
                {"noise_sigma", cfg.model.noise_sigma},
                {"cycles", cfg.model.cycles}};
  j["attack"] = {{"num_traces", cfg.attack.num_traces},
                 {"attempts", cfg.attack.attempts},
                 {"threshold", cfg.attack.threshold},
                 {"sbox", cfg.attack.sbox},
                 {"subkey", cfg.attack.subkey},
                 {"dpa_bit", cfg.attack.dpa_bit},
                 {"fixed_plaintext", cfg.attack.fixed_plaintext},
                 {"plaintext_port", cfg.attack.ports.plaintext},
                 {"key_port", cfg.attack.ports.key}};
  j["mi"] = {{"samples", cfg.mi.samples}, {"bins", cfg.mi.bins}};
  j["gridsearch"] = {{"grid", cfg.gridsearch.grid},
                     {"attempts", cfg.gridsearch.attempts},
                     {"num_traces", cfg.gridsearch.num_traces}};
  return j;
}

void write_json(const json& doc, const std::string& path) {
  write_text(doc.dump(2) + "\n", path);
}

// ---------------------------------------------------------------------------
// Synthesis

void plan_blocks(SynthResult& r, const CellLibrary& lib, const RunConfig& cfg) {
  std::map<std::string, BlockPlan*> by_function;
  for (const auto& m : r.original.modules) {
    for (const auto& b : m.blocks) {
      if (b.is_sequential()) continue;
      TruthTable table = block_function(b);
      const std::string key = std::to_string(table.num_inputs()) + "/" +
                              std::to_string(table.num_outputs()) + "/" + table.to_string();
      if (auto it = by_function.find(key); it != by_function.end()) {
        r.plan_of[b.id] = it->second;
        continue;
      }
      auto plan = std::make_unique<BlockPlan>();
      plan->table = table;
      auto seeds = find_direct(table, lib);
      const PrimitiveDag dag = decompose(table);
      int budget = cfg.sa.max_cells;
      auto covers = explore_indirect(dag, lib, std::numeric_limits<int>::max());
      if (seeds.empty()) {
        int smallest = std::numeric_limits<int>::max();
        for (const auto& c : covers) smallest = std::min(smallest, c.size());
        if (covers.empty()) throw Error(ErrorKind::kInfeasible, "block " + b.name + ": library admits no cover");
        if (smallest > budget) budget = smallest + cfg.sa.max_cells;
      }
      for (auto& c : covers) {
        if (c.size() <= budget) seeds.push_back(std::move(c));
      }
      plan->budget = budget;

      SAConfig sa = cfg.sa;
      sa.max_cells = budget;
      sa.seed = mix(cfg.seed, fnv1a(key));
      SAConfig area = sa;
      area.w_power = 0.0;
      area.w_area = 1.0;
      area.keep_top_k = 1;
      try {
        plan->baseline = simulated_annealing(seeds, table, lib, area).combinations.front();
        plan->candidates = simulated_annealing(seeds, table, lib, sa);
      } catch (const Error& e) {
        throw Error(e.kind(), "block " + b.name + ": " + e.what());
      }
      by_function[key] = plan.get();
      r.plan_of[b.id] = plan.get();
      r.plans.push_back(std::move(plan));
    }
  }
}

void assign_and_emit(SynthResult& r, const CellLibrary& lib, const RunConfig& cfg) {
  r.partition = partition(r.original, r.profiles, cfg.fanout_threshold);
  std::map<int, const VulnerabilityProfile*> profile_of;
  for (const auto& p : r.profiles) profile_of[p.block_id] = &p;

  r.baseline = {};
  r.baseline.mode = cfg.mode;
  for (auto [id, plan] : r.plan_of) {
    r.baseline.assignment[id] = {plan->baseline,
                                 mapping_cost(*profile_of.at(id), plan->baseline, lib, cfg.weights),
                                 {-1, -1}};
  }

  std::vector<BlockTarget> rows;
  std::vector<CandidateSet> sets;
  for (int id : r.partition.vulnerable) {
    auto it = r.plan_of.find(id);
    if (it == r.plan_of.end()) continue;  // sequential
    rows.push_back({id, *profile_of.at(id), it->second->table});
    CandidateSet s = it->second->candidates;
    s.target = id;
    sets.push_back(std::move(s));
  }
  if (rows.empty()) {
    r.solution = {};
    r.solution.mode = cfg.mode;
  } else {
    r.solution = solve_mapping(rows, sets, lib, cfg.weights, cfg.mode, cfg.min_ds);
  }
  for (int id : r.partition.conventional) {
    auto it = r.baseline.assignment.find(id);
    if (it != r.baseline.assignment.end()) r.solution.assignment[id] = it->second;
  }

  r.conventional = emit_design(r.original, r.baseline, lib);
  r.posyn = emit_design(r.original, r.solution, lib);
  r.eq_conventional = verify_design(r.original, r.conventional, lib);
  r.eq_posyn = verify_design(r.original, r.posyn, lib);
}

SynthResult synthesize(const Design& design, const CellLibrary& lib, const AnnotationSet& ann,
                       const RunConfig& cfg) {
  SynthResult r;
  r.original = design;
  r.profiles = profile_blocks(r.original, ann);
  plan_blocks(r, lib, cfg);
  assign_and_emit(r, lib, cfg);
  return r;
}

json solution_json(const SynthResult& r, const CellLibrary& lib, const RunConfig& cfg) {
  std::set<int> vulnerable(r.partition.vulnerable.begin(), r.partition.vulnerable.end());
  json blocks = json::object();
  for (const auto& p : r.profiles) {
    auto [mod, blk] = r.original.find_block(p.block_id);
    json b;
    b["id"] = p.block_id;
    b["module"] = mod->name;
    b["kind"] = std::string(to_string(blk->kind));
    b["vulnerable"] = vulnerable.count(p.block_id) > 0;
    b["profile"] = {{"sv", p.sv}, {"io", p.io}, {"f", p.f}, {"leaky", p.leaky}, {"intensive", p.intensive}};
    if (auto it = r.solution.assignment.find(p.block_id); it != r.solution.assignment.end()) {
      const auto& mb = it->second;
      json cells = json::array();
      for (const auto& n : mb.comb.nodes) cells.push_back(lib.cell(n.cell).name);
      b["cells"] = cells;
      b["wiring"] = describe(mb.comb, lib);
      b["cost"] = mb.cost;
      b["area"] = total_area(mb.comb, lib);
      b["cap"] = total_cap(mb.comb, lib);
      const auto* plan = r.plan_of.at(p.block_id);
      b["candidates"] = plan->candidates.combinations.size();
      b["budget"] = plan->budget;
      b["baseline_cells"] = plan->baseline.size();
    } else {
      b["cells"] = json::array({lib.cell(lib.default_flop()).name});
    }
    blocks[blk->name] = std::move(b);
  }
  double area_conv = 0, area_posyn = 0;
  for (const auto& [id, mb] : r.baseline.assignment) area_conv += total_area(mb.comb, lib);
  for (const auto& [id, mb] : r.solution.assignment) area_posyn += total_area(mb.comb, lib);
  json j;
  j["mode"] = std::string(to_string(r.solution.mode));
  j["total_cost"] = r.solution.total_cost;
  j["weights"] = {{"alpha", cfg.weights.alpha}, {"beta", cfg.weights.beta}, {"gamma", cfg.weights.gamma}};
  j["blocks"] = std::move(blocks);
  j["vulnerable"] = r.partition.vulnerable.size();
  j["conventional"] = r.partition.conventional.size();
  j["area"] = {{"conventional", area_conv}, {"posyn", area_posyn}};
  j["netlist_change"] = netlist_change(r.conventional, r.posyn);
  return j;
}

json equivalence_json(const EquivalenceReport& report) {
  json cones = json::array();
  for (const auto& c : report.cones) {
    json j;
    j["id"] = c.id;
    j["inputs"] = c.inputs;
    j["equivalent"] = c.equivalent;
    j["unverifiable"] = c.unverifiable;
    j["counterexample"] = c.counterexample ? json(*c.counterexample) : json(nullptr);
    cones.push_back(std::move(j));
  }
  return {{"overall", report.overall}, {"cones", std::move(cones)}, {"summary", report.summary()}};
}

// ---------------------------------------------------------------------------
// Evaluation harnesses

AttackSummary run_attacks(const Design& mapped, const CellLibrary& lib, const RunConfig& cfg,
                          int attempts, int num_traces, bool dpa) {
  const SboxTarget target = cfg.attack.target();
  const int pt_w = port_width(mapped, cfg.attack.ports.plaintext);
  const int key_w = port_width(mapped, cfg.attack.ports.key);
  if (target.offset + target.bits > std::min(pt_w, key_w))
    throw Error(ErrorKind::kValidation, "attack.subkey outside the plaintext or key port");

  AttackSummary s;
  for (int a = 0; a < attempts; ++a) {
    std::mt19937_64 rng(mix(cfg.seed, 0xa77ac000ULL + static_cast<std::uint64_t>(a)));
    const std::uint64_t key = rng() & width_mask(key_w);
    std::vector<std::uint64_t> pts(static_cast<std::size_t>(num_traces));
    for (auto& p : pts) p = rng() & width_mask(pt_w);
    PowerModel model = cfg.model;
    model.seed = mix(cfg.seed, static_cast<std::uint64_t>(a));
    TraceSet ts = simulate_traces(mapped, lib, pts, key_bytes(key, key_w), model, cfg.attack.ports);
    const AttackResult cpa = cpa_attack(ts, target);
    s.cpa_outcomes.push_back(cpa.success ? 1 : 0);
    s.cpa_best.push_back(cpa.best_key);
    s.true_keys.push_back(cpa.true_key);
    if (dpa) {
      const AttackResult d = dpa_attack(ts, target, cfg.attack.dpa_bit);
      s.dpa_outcomes.push_back(d.success ? 1 : 0);
      s.dpa_best.push_back(d.best_key);
    }
    if (a == 0) s.first_traces = std::move(ts);
  }
  s.cpa_rate = success_rate(s.cpa_outcomes);
  if (dpa) s.dpa_rate = success_rate(s.dpa_outcomes);
  return s;
}

TvlaRun run_tvla(const Design& mapped, const CellLibrary& lib, const RunConfig& cfg) {
  const int pt_w = port_width(mapped, cfg.attack.ports.plaintext);
  const int key_w = port_width(mapped, cfg.attack.ports.key);
  std::mt19937_64 rng(mix(cfg.seed, 0x7e57));
  const std::uint64_t key = rng() & width_mask(key_w);
  const std::size_t half = static_cast<std::size_t>(cfg.attack.num_traces / 2);
  const std::uint64_t fixed_pt = cfg.attack.fixed_plaintext;
  if (fixed_pt & ~width_mask(pt_w)) throw Error(ErrorKind::kValidation, "attack.fixed_plaintext exceeds port");
  std::vector<std::uint64_t> fixed(half, fixed_pt);
  std::vector<std::uint64_t> random(half);
  for (auto& p : random) p = rng() & width_mask(pt_w);
  const auto kb = key_bytes(key, key_w);
  PowerModel m1 = cfg.model;
  m1.seed = mix(cfg.seed, 0xf1);
  PowerModel m2 = cfg.model;
  m2.seed = mix(cfg.seed, 0xf2);
  TvlaRun run;
  run.fixed = simulate_traces(mapped, lib, fixed, kb, m1, cfg.attack.ports);
  run.random = simulate_traces(mapped, lib, random, kb, m2, cfg.attack.ports);
  run.result = tvla(run.fixed, run.random, cfg.attack.threshold);
  return run;
}

std::vector<double> energy_by_subkey(const Design& mapped, const CellLibrary& lib, const RunConfig& cfg) {
  const SboxTarget target = cfg.attack.target();
  const int key_w = port_width(mapped, cfg.attack.ports.key);
  PowerModel model = cfg.model;
  model.noise_sigma = 0.0;
  std::vector<double> energy;
  const std::uint64_t pt = cfg.attack.fixed_plaintext;
  for (int k = 0; k < target.guesses(); ++k) {
    const std::uint64_t key = static_cast<std::uint64_t>(k) << target.offset;
    TraceSet ts = simulate_traces(mapped, lib, std::span(&pt, 1), key_bytes(key, key_w), model,
                                  cfg.attack.ports);
    energy.push_back(ts.traces.row(0).cast<double>().sum());
  }
  return energy;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Loaded {
  Design design;
  CellLibrary lib;
  AnnotationSet ann;
};

Loaded load_inputs(const RunConfig& cfg) {
  Loaded in;
  in.lib = load_library(cfg.library);
  in.design = load_netlist(cfg.netlist);
  if (!cfg.annotations.empty()) in.ann = load_annotations_file(cfg.annotations);
  return in;
}

Design load_mapped(const RunConfig& cfg, const std::string& design) {
  check_design_choice(design);
  const std::string path = out_path(cfg, design + ".net");
  if (!fs::is_regular_file(path))
    throw Error(ErrorKind::kIo, "missing artifact " + path + " (run synth first)");
  return load_netlist(path);
}

json tvla_json(const TvlaResult& t) {
  json tv = json::array();
  for (Eigen::Index i = 0; i < t.t_values.size(); ++i) {
    const double v = t.t_values[i];
    tv.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  }
  return {{"t_values", tv},
          {"excluded", t.excluded},
          {"max_abs_t", t.max_abs_t},
          {"exceed_count", t.exceed_count},
          {"threshold", t.threshold},
          {"pass", t.exceed_count == 0}};
}

}  // namespace

json cmd_synth(const RunConfig& cfg) {
  Loaded in = load_inputs(cfg);
  SynthResult r = synthesize(in.design, in.lib, in.ann, cfg);

  fs::create_directories(cfg.output_dir);
  write_text(print_design(r.conventional), out_path(cfg, "conventional.net"));
  write_text(print_design(r.posyn), out_path(cfg, "posyn.net"));
  json sol = solution_json(r, in.lib, cfg);
  write_json(sol, out_path(cfg, "solution.json"));
  json eq = {{"conventional", equivalence_json(r.eq_conventional)},
             {"posyn", equivalence_json(r.eq_posyn)}};
  write_json(eq, out_path(cfg, "equivalence.json"));

  // Self-contained copy of the inputs so later commands can run from the
  // output directory alone.
  write_text(read_text(cfg.library), out_path(cfg, "library.json"));
  write_text(read_text(cfg.netlist), out_path(cfg, "original.net"));
  json local = to_json(cfg);
  local["library"] = "library.json";
  local["netlist"] = "original.net";
  local["output_dir"] = ".";
  if (!cfg.annotations.empty()) {
    write_text(read_text(cfg.annotations), out_path(cfg, "annotations.json"));
    local["annotations"] = "annotations.json";
  }
  write_json(local, out_path(cfg, "config.json"));

  json report = {{"command", "synth"},
                 {"equivalence", {{"conventional", r.eq_conventional.overall},
                                  {"posyn", r.eq_posyn.overall}}},
                 {"total_cost", r.solution.total_cost},
                 {"mode", std::string(to_string(cfg.mode))},
                 {"vulnerable", r.partition.vulnerable.size()},
                 {"netlist_change", sol["netlist_change"]},
                 {"area", sol["area"]}};
  if (!r.eq_conventional.overall || !r.eq_posyn.overall) {
    throw Error(ErrorKind::kEquivalence,
                "equivalence failed: conventional " + r.eq_conventional.summary() + "; posyn " +
                    r.eq_posyn.summary());
  }
  return report;
}

json cmd_attack(const RunConfig& cfg, const std::string& design) {
  const Design mapped = load_mapped(cfg, design);
  const CellLibrary lib = load_library(cfg.library);
  if (cfg.attack.attempts == 0) (void)success_rate({});
  AttackSummary s = run_attacks(mapped, lib, cfg, cfg.attack.attempts, cfg.attack.num_traces);
  json attempts = json::array();
  for (std::size_t a = 0; a < s.cpa_outcomes.size(); ++a) {
    attempts.push_back({{"attempt", a},
                        {"true_key", s.true_keys[a]},
                        {"cpa_best", s.cpa_best[a]},
                        {"cpa_success", s.cpa_outcomes[a] != 0},
                        {"dpa_best", s.dpa_best[a]},
                        {"dpa_success", s.dpa_outcomes[a] != 0}});
  }
  json report = {{"command", "attack"},
                 {"design", design},
                 {"attempts", cfg.attack.attempts},
                 {"num_traces", cfg.attack.num_traces},
                 {"noise_sigma", cfg.model.noise_sigma},
                 {"cpa_success_rate", s.cpa_rate},
                 {"dpa_success_rate", s.dpa_rate},
                 {"outcomes", attempts}};
  fs::create_directories(cfg.output_dir);
  write_json(report, out_path(cfg, "attack_" + design + ".json"));
  write_traces(s.first_traces, out_path(cfg, "traces_" + design + ".psyn"));
  return report;
}

json cmd_tvla(const RunConfig& cfg, const std::string& design) {
  const Design mapped = load_mapped(cfg, design);
  const CellLibrary lib = load_library(cfg.library);
  TvlaRun run = run_tvla(mapped, lib, cfg);
  json report = tvla_json(run.result);
  report["command"] = "tvla";
  report["design"] = design;
  report["fixed_traces"] = run.fixed.num_traces();
  report["random_traces"] = run.random.num_traces();
  fs::create_directories(cfg.output_dir);
  write_json(report, out_path(cfg, "tvla_" + design + ".json"));
  write_traces(run.fixed, out_path(cfg, "tvla_fixed_" + design + ".psyn"));
  write_traces(run.random, out_path(cfg, "tvla_random_" + design + ".psyn"));
  return report;
}

json cmd_mi(const RunConfig& cfg) {
  const CellLibrary lib = load_library(cfg.library);
  const Design conv = load_mapped(cfg, "conventional");
  const Design posyn = load_mapped(cfg, "posyn");
  const auto e_conv = energy_by_subkey(conv, lib, cfg);
  const auto e_posyn = energy_by_subkey(posyn, lib, cfg);
  const int guesses = static_cast<int>(e_conv.size());

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* e : {&e_conv, &e_posyn}) {
    for (double v : *e) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::mt19937_64 rng(mix(cfg.seed, 0x4d49));
  std::uniform_int_distribution<int> pick(0, guesses - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto n = static_cast<std::size_t>(cfg.mi.samples);
  std::vector<int> keys(n);
  std::vector<double> l_conv(n), l_posyn(n), l_key(n), l_noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = pick(rng);
    l_conv[i] = e_conv[keys[i]];
    l_posyn[i] = e_posyn[keys[i]];
    l_key[i] = keys[i];
    l_noise[i] = noise(rng);
  }
  const auto range = std::make_pair(lo, hi);
  const double mi_conv = estimate_mutual_information(keys, l_conv, cfg.mi.bins, range);
  const double mi_posyn = estimate_mutual_information(keys, l_posyn, cfg.mi.bins, range);
  const double mi_kk = estimate_mutual_information(keys, l_key, guesses);
  const double mi_noise = estimate_mutual_information(keys, l_noise, cfg.mi.bins);
  json report = {{"command", "mi"},
                 {"samples", cfg.mi.samples},
                 {"bins", cfg.mi.bins},
                 {"range", {lo, hi}},
                 {"energy", {{"conventional", e_conv}, {"posyn", e_posyn}}},
                 {"mi", {{"conventional", mi_conv}, {"posyn", mi_posyn}}},
                 {"sanity", {{"key_entropy", std::log2(static_cast<double>(guesses))},
                             {"mi_key_key", mi_kk},
                             {"mi_key_noise", mi_noise}}}};
  fs::create_directories(cfg.output_dir);
  write_json(report, out_path(cfg, "mi.json"));
  return report;
}

json cmd_gridsearch(const RunConfig& cfg) {
  Loaded in = load_inputs(cfg);
  SynthResult r;
  r.original = in.design;
  r.profiles = profile_blocks(r.original, in.ann);
  plan_blocks(r, in.lib, cfg);

  struct Row {
    CostWeights w;
    double cpa = 0;
    double change = 0;
    double cost = 0;
  };
  std::vector<Row> rows;
  json skipped = json::array();
  const auto& g = cfg.gridsearch.grid;
  for (double a : g) {
    for (double b : g) {
      for (double c : g) {
        RunConfig point = cfg;
        point.weights = {a, b, c};
        try {
          point.weights.validate();
        } catch (const Error& e) {
          std::cerr << "warning: skipping weights (" << a << ", " << b << ", " << c
                    << "): " << e.what() << "\n";
          skipped.push_back({a, b, c});
          continue;
        }
        assign_and_emit(r, in.lib, point);
        if (!r.eq_posyn.overall)
          throw Error(ErrorKind::kEquivalence, "gridsearch: equivalence failed at a grid point");
        AttackSummary s = run_attacks(r.posyn, in.lib, point, cfg.gridsearch.attempts,
                                      cfg.gridsearch.num_traces, false);
        rows.push_back({point.weights, s.cpa_rate, netlist_change(r.conventional, r.posyn),
                        r.solution.total_cost});
      }
    }
  }
  if (rows.empty()) throw Error(ErrorKind::kValidation, "gridsearch: no valid weight triple in the grid");
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.cpa != y.cpa) return x.cpa < y.cpa;
    return x.change < y.change;
  });
  json table = json::array();
  for (const auto& row : rows) {
    table.push_back({{"alpha", row.w.alpha},
                     {"beta", row.w.beta},
                     {"gamma", row.w.gamma},
                     {"cpa_success_rate", row.cpa},
                     {"netlist_change", row.change},
                     {"total_cost", row.cost}});
  }
  const auto& best = rows.front();
  json report = {{"command", "gridsearch"},
                 {"best", {{"alpha", best.w.alpha}, {"beta", best.w.beta}, {"gamma", best.w.gamma}}},
                 {"best_cpa_success_rate", best.cpa},
                 {"attempts", cfg.gridsearch.attempts},
                 {"num_traces", cfg.gridsearch.num_traces},
                 {"skipped", skipped},
                 {"sweep", table}};
  fs::create_directories(cfg.output_dir);
  write_json(report, out_path(cfg, "gridsearch.json"));
  return report;
}

json cmd_report(const RunConfig& cfg) {
  auto load = [&](const std::string& name) -> json {
    const std::string path = out_path(cfg, name);
    if (!fs::is_regular_file(path)) return nullptr;
    try {
      return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kSyntax, path + ": " + e.what());
    }
  };
  json report = {{"command", "report"}};
  if (json s = load("solution.json"); !s.is_null()) {
    report["synth"] = {{"mode", s["mode"]},
                       {"total_cost", s["total_cost"]},
                       {"area", s["area"]},
                       {"netlist_change", s["netlist_change"]}};
  }
  if (json e = load("equivalence.json"); !e.is_null()) {
    report["equivalence"] = {{"conventional", e["conventional"]["overall"]},
                             {"posyn", e["posyn"]["overall"]}};
  }
  for (std::string d : {"conventional", "posyn"}) {
    if (json a = load("attack_" + d + ".json"); !a.is_null()) {
      report["attack"][d] = {{"cpa_success_rate", a["cpa_success_rate"]},
                             {"dpa_success_rate", a["dpa_success_rate"]}};
    }
    if (json t = load("tvla_" + d + ".json"); !t.is_null()) {
      report["tvla"][d] = {{"max_abs_t", t["max_abs_t"]}, {"exceed_count", t["exceed_count"]}};
    }
  }
  if (json m = load("mi.json"); !m.is_null()) report["mi"] = m["mi"];
  if (json g = load("gridsearch.json"); !g.is_null()) {
    report["gridsearch"] = {{"best", g["best"]}, {"best_cpa_success_rate", g["best_cpa_success_rate"]}};
  }
  fs::create_directories(cfg.output_dir);
  write_json(report, out_path(cfg, "report.json"));
  return report;
}

}  // namespace scmap
