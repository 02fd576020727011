// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

// scmap command-line driver.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scmap/error.hpp"
#include "scmap/flow.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kEquivalence = 3, kInfeasible = 4 };

int exit_code(scmap::ErrorKind kind) {
  switch (kind) {
    case scmap::ErrorKind::kEquivalence:
      return kEquivalence;
    case scmap::ErrorKind::kInfeasible:
      return kInfeasible;
    default:
      return kValidation;
  }
}

void print_summary(const nlohmann::json& r) {
  const std::string cmd = r.value("command", "");
  if (cmd == "synth") {
    std::cout << "synth: equivalence conventional=" << r["equivalence"]["conventional"]
              << " posyn=" << r["equivalence"]["posyn"] << ", total_cost=" << r["total_cost"]
              << ", netlist change " << r["netlist_change"] << "%\n";
  } else if (cmd == "attack") {
    std::cout << "attack " << r["design"].get<std::string>() << ": CPA " << r["cpa_success_rate"]
              << ", DPA " << r["dpa_success_rate"] << " over " << r["attempts"] << " attempts\n";
  } else if (cmd == "tvla") {
    std::cout << "tvla " << r["design"].get<std::string>() << ": max|t| = " << r["max_abs_t"]
              << ", " << r["exceed_count"] << " samples above " << r["threshold"] << " ("
              << (r["pass"].get<bool>() ? "pass" : "fail") << ")\n";
  } else if (cmd == "mi") {
    std::cout << "mi: conventional " << r["mi"]["conventional"] << " bits, posyn "
              << r["mi"]["posyn"] << " bits\n";
  } else if (cmd == "gridsearch") {
    std::cout << "gridsearch: best " << r["best"].dump() << ", CPA "
              << r["best_cpa_success_rate"] << "\n";
  } else {
    std::cout << r.dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Side-channel-aware technology mapping"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string design = "posyn";
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--mode", mode, "assignment mode")
        ->check(CLI::IsMember({"replicated", "exclusive"}));
    sub->add_option("--out", out, "override the output directory");
  };
  auto* synth = app.add_subcommand("synth", "map, assign, emit and verify");
  auto* attack = app.add_subcommand("attack", "CPA and DPA success rates");
  auto* tvla = app.add_subcommand("tvla", "fixed-vs-random Welch t-test");
  auto* mi = app.add_subcommand("mi", "key/leakage mutual information");
  auto* grid = app.add_subcommand("gridsearch", "sweep the cost weights");
  auto* report = app.add_subcommand("report", "summarize existing reports");
  for (auto* sub : {synth, attack, tvla, mi, grid, report}) add_common(sub);
  for (auto* sub : {attack, tvla}) {
    sub->add_option("--design", design, "mapped design to evaluate")
        ->check(CLI::IsMember({"conventional", "posyn"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    scmap::RunConfig cfg = scmap::load_run_config(config);
    if (seed) cfg.seed = *seed;
    if (!mode.empty()) cfg.mode = scmap::parse_solve_mode(mode);
    if (!out.empty()) cfg.output_dir = out;

    nlohmann::json r;
    if (synth->parsed()) r = scmap::cmd_synth(cfg);
    else if (attack->parsed()) r = scmap::cmd_attack(cfg, design);
    else if (tvla->parsed()) r = scmap::cmd_tvla(cfg, design);
    else if (mi->parsed()) r = scmap::cmd_mi(cfg);
    else if (grid->parsed()) r = scmap::cmd_gridsearch(cfg);
    else r = scmap::cmd_report(cfg);
    print_summary(r);
    return kOk;
  } catch (const scmap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}
