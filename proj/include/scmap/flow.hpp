// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "scmap/assignment.hpp"
#include "scmap/equivalence.hpp"
#include "scmap/mapper.hpp"
#include "scmap/power_sim.hpp"
#include "scmap/sca_eval.hpp"
#include "scmap/vulnerability.hpp"

namespace scmap {

struct AttackConfig {
  int num_traces = 4000;
  int attempts = 50;
  double threshold = kTvlaThreshold;
  std::string sbox = "present";  // present | aes
  int subkey = 0;
  int dpa_bit = 0;
  std::uint64_t fixed_plaintext = 0;
  StimulusPorts ports;

  SboxTarget target() const;
};

struct MiConfig {
  int samples = 100000;
  int bins = 16;
};

struct GridConfig {
  std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0};
  int attempts = 50;
  int num_traces = 4000;
};

struct RunConfig {
  std::string netlist;
  std::string library;
  std::string annotations;  // optional
  std::string output_dir;
  std::uint64_t seed = 1;
  SolveMode mode = SolveMode::kReplicated;
  int fanout_threshold = kDefaultFanoutThreshold;
  double min_ds = 0.0;
  CostWeights weights;
  SAConfig sa;
  PowerModel model;
  AttackConfig attack;
  MiConfig mi;
  GridConfig gridsearch;

  void validate() const;
};

/// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Per-function candidates shared by every block computing that function.
struct BlockPlan {
  TruthTable table;
  int budget = 0;
  CandidateCombination baseline;  // minimum-area combination
  CandidateSet candidates;
};

struct SynthResult {
  Design original;
  std::vector<VulnerabilityProfile> profiles;
  Partition partition;
  std::map<int, const BlockPlan*> plan_of;  // block id -> plan
  std::vector<std::unique_ptr<BlockPlan>> plans;
  MappingSolution baseline;
  MappingSolution solution;
  Design conventional;
  Design posyn;
  EquivalenceReport eq_conventional;
  EquivalenceReport eq_posyn;
};

/// Candidate generation and annealing for every combinational block.
void plan_blocks(SynthResult& r, const CellLibrary& lib, const RunConfig& cfg);

/// Cost-driven assignment of the vulnerable blocks, emission and verification.
void assign_and_emit(SynthResult& r, const CellLibrary& lib, const RunConfig& cfg);

SynthResult synthesize(const Design& design, const CellLibrary& lib,
                       const AnnotationSet& ann, const RunConfig& cfg);

nlohmann::json solution_json(const SynthResult& r, const CellLibrary& lib,
                             const RunConfig& cfg);
nlohmann::json equivalence_json(const EquivalenceReport& report);

/// Success-rate protocol: each attempt draws a fresh key and plaintexts.
struct AttackSummary {
  std::vector<char> cpa_outcomes;
  std::vector<char> dpa_outcomes;
  std::vector<int> true_keys;
  std::vector<int> cpa_best;
  std::vector<int> dpa_best;
  double cpa_rate = 0.0;
  double dpa_rate = 0.0;
  TraceSet first_traces;
};
AttackSummary run_attacks(const Design& mapped, const CellLibrary& lib,
                          const RunConfig& cfg, int attempts, int num_traces,
                          bool dpa = true);

struct TvlaRun {
  TraceSet fixed;
  TraceSet random;
  TvlaResult result;
};
TvlaRun run_tvla(const Design& mapped, const CellLibrary& lib, const RunConfig& cfg);

/// Noiseless energy per sub-key value under the fixed plaintext.
std::vector<double> energy_by_subkey(const Design& mapped, const CellLibrary& lib,
                                     const RunConfig& cfg);

// CLI commands; each returns its JSON report and writes files under
// cfg.output_dir.
nlohmann::json cmd_synth(const RunConfig& cfg);
nlohmann::json cmd_attack(const RunConfig& cfg, const std::string& design);
nlohmann::json cmd_tvla(const RunConfig& cfg, const std::string& design);
nlohmann::json cmd_mi(const RunConfig& cfg);
nlohmann::json cmd_gridsearch(const RunConfig& cfg);
nlohmann::json cmd_report(const RunConfig& cfg);

void write_json(const nlohmann::json& doc, const std::string& path);

}  // namespace scmap
