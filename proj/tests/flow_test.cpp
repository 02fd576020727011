// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "scmap/error.hpp"
#include "scmap/flow.hpp"
#include "scmap/sca_eval.hpp"
#include "test_util.hpp"

namespace scmap {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::data_path;

json base_config(const std::string& fixture) {
  std::ifstream in(data_path("configs/" + fixture + ".json"));
  return json::parse(in);
}

std::string scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("scmap_flow_" + name);
  fs::remove_all(dir);
  return dir.string();
}

RunConfig config_for(const std::string& fixture, const std::string& out) {
  json doc = base_config(fixture);
  doc["output_dir"] = out;
  return parse_run_config(doc, data_path("configs"));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kSyntax;
}

TEST(Config, LoadsFixtureConfig) {
  const RunConfig cfg = load_run_config(data_path("configs/half_adder.json"));
  EXPECT_TRUE(fs::is_regular_file(cfg.netlist));
  EXPECT_TRUE(fs::is_regular_file(cfg.library));
  EXPECT_EQ(cfg.attack.num_traces, 4000);
  EXPECT_EQ(cfg.attack.attempts, 50);
  EXPECT_DOUBLE_EQ(cfg.attack.threshold, 4.5);
  EXPECT_EQ(cfg.mode, SolveMode::kReplicated);
  const json round = to_json(cfg);
  const RunConfig again = parse_run_config(round, "/");
  EXPECT_EQ(again.netlist, cfg.netlist);
  EXPECT_EQ(again.sa.iterations, cfg.sa.iterations);
}

TEST(Config, Errors) {
  const std::string base = data_path("configs");
  json doc = base_config("half_adder");
  doc["colour"] = 1;
  EXPECT_EQ(kind_of([&] { parse_run_config(doc, base); }), ErrorKind::kValidation);

  doc = base_config("half_adder");
  doc["netlist"] = "../fixtures/missing.net";
  EXPECT_EQ(kind_of([&] { parse_run_config(doc, base); }), ErrorKind::kIo);

  doc = base_config("half_adder");
  doc["weights"]["alpha"] = -1.0;
  EXPECT_EQ(kind_of([&] { parse_run_config(doc, base); }), ErrorKind::kValidation);

  doc = base_config("half_adder");
  doc["mode"] = "greedy";
  EXPECT_EQ(kind_of([&] { parse_run_config(doc, base); }), ErrorKind::kValidation);

  doc = base_config("half_adder");
  doc["sa"]["cooling_rate"] = 1.5;
  EXPECT_EQ(kind_of([&] { parse_run_config(doc, base); }), ErrorKind::kValidation);

  doc = base_config("half_adder");
  doc.erase("library");
  EXPECT_EQ(kind_of([&] { parse_run_config(doc, base); }), ErrorKind::kValidation);

  EXPECT_EQ(kind_of([] { load_run_config("/nonexistent/config.json"); }), ErrorKind::kIo);
}

TEST(Synth, HalfAdder) {
  const std::string out = scratch("half_adder");
  const RunConfig cfg = config_for("half_adder", out);
  const json report = cmd_synth(cfg);
  EXPECT_TRUE(report["equivalence"]["conventional"].get<bool>());
  EXPECT_TRUE(report["equivalence"]["posyn"].get<bool>());
  for (const char* f : {"conventional.net", "posyn.net", "solution.json", "equivalence.json",
                        "config.json", "library.json", "original.net"}) {
    EXPECT_TRUE(fs::is_regular_file(fs::path(out) / f)) << f;
  }
  // The copied config reproduces the run from the output directory alone.
  const RunConfig local = load_run_config((fs::path(out) / "config.json").string());
  EXPECT_TRUE(fs::equivalent(local.output_dir, out));
  fs::remove_all(out);
}

TEST(Synth, ImpossibleLibraryIsReported) {
  const std::string out = scratch("bad_lib");
  fs::create_directories(out);
  const std::string lib = out + "/lib.json";
  std::ofstream(lib) << testing::library_json({{"AND2_X1", {"a", "b"}, "a&b"},
                                               {"DFF_X1", {"d"}, "d", 1, 1, 4, true}});
  json doc = base_config("half_adder");
  doc["library"] = lib;
  doc["output_dir"] = out;
  const RunConfig cfg = parse_run_config(doc, data_path("configs"));
  EXPECT_EQ(kind_of([&] { cmd_synth(cfg); }), ErrorKind::kValidation);
  fs::remove_all(out);
}

TEST(Synth, PresentRoundBothModes) {
  RunConfig cfg = config_for("present_round", scratch("present_round"));
  const Design d = load_netlist(cfg.netlist);
  const CellLibrary lib = load_library(cfg.library);
  const AnnotationSet ann = load_annotations_file(cfg.annotations);
  SynthResult r = synthesize(d, lib, ann, cfg);
  EXPECT_TRUE(r.eq_conventional.overall);
  EXPECT_TRUE(r.eq_posyn.overall);
  const double replicated = r.solution.total_cost;
  cfg.mode = SolveMode::kExclusive;
  assign_and_emit(r, lib, cfg);
  EXPECT_TRUE(r.eq_posyn.overall);
  EXPECT_GE(r.solution.total_cost, replicated - 1e-9);
  EXPECT_EQ(r.solution.mode, SolveMode::kExclusive);
}

TEST(Attack, ZeroAttemptsIsAnError) {
  const std::string out = scratch("attack0");
  RunConfig cfg = config_for("present_sbox4", out);
  cmd_synth(cfg);
  cfg.attack.attempts = 0;
  EXPECT_EQ(kind_of([&] { cmd_attack(cfg, "conventional"); }), ErrorKind::kValidation);
  fs::remove_all(out);
}

TEST(Attack, NoiselessConventionalSboxIsBroken) {
  const std::string out = scratch("attack_noiseless");
  RunConfig cfg = config_for("present_sbox4", out);
  cmd_synth(cfg);
  cfg.model.noise_sigma = 0.0;
  cfg.attack.attempts = 10;
  cfg.attack.num_traces = 400;
  const json rep = cmd_attack(cfg, "conventional");
  EXPECT_DOUBLE_EQ(rep["cpa_success_rate"].get<double>(), 1.0);
  EXPECT_EQ(rep["outcomes"].size(), 10u);
  EXPECT_TRUE(fs::is_regular_file(fs::path(out) / "attack_conventional.json"));
  EXPECT_TRUE(fs::is_regular_file(fs::path(out) / "traces_conventional.psyn"));
  EXPECT_EQ(kind_of([&] { cmd_attack(cfg, "masked"); }), ErrorKind::kValidation);
  fs::remove_all(out);
}

TEST(Tvla, ConventionalSboxLeaks) {
  const std::string out = scratch("tvla");
  RunConfig cfg = config_for("present_sbox4", out);
  cmd_synth(cfg);
  cfg.model.noise_sigma = 0.0;
  const json rep = cmd_tvla(cfg, "conventional");
  EXPECT_GT(rep["max_abs_t"].get<double>(), kTvlaThreshold);
  fs::remove_all(out);
}

TEST(Gridsearch, SinglePointAndAllZeroSkipped) {
  const std::string out = scratch("grid");
  RunConfig cfg = config_for("present_sbox4", out);
  cfg.gridsearch.grid = {0.0, 1.0};
  cfg.gridsearch.attempts = 2;
  cfg.gridsearch.num_traces = 200;
  const json rep = cmd_gridsearch(cfg);
  ASSERT_EQ(rep["skipped"].size(), 1u);
  EXPECT_EQ(rep["skipped"][0], json({0.0, 0.0, 0.0}));
  EXPECT_EQ(rep["sweep"].size(), 7u);
  double prev = -1.0;
  for (const auto& row : rep["sweep"]) {
    EXPECT_GE(row["cpa_success_rate"].get<double>(), prev);
    prev = row["cpa_success_rate"].get<double>();
  }

  cfg.gridsearch.grid = {1.0};
  const json one = cmd_gridsearch(cfg);
  EXPECT_EQ(one["sweep"].size(), 1u);
  EXPECT_EQ(one["best"], json({{"alpha", 1.0}, {"beta", 1.0}, {"gamma", 1.0}}));
  fs::remove_all(out);
}

}  // namespace
}  // namespace scmap
