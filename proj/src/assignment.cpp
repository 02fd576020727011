// Copyright 2026 The scmap Authors
// SPDX-License-Identifier: Apache-2.0

#include "scmap/assignment.hpp"

#include <cmath>
#include <limits>

#include "scmap/equivalence.hpp"
#include "scmap/error.hpp"

namespace scmap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void CostWeights::validate() const {
  for (double v : {alpha, beta, gamma}) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::kValidation, "cost weights must be finite and >= 0");
  }
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0) throw Error(ErrorKind::kValidation, "cost weights must not all be zero");
}

double mapping_cost(const VulnerabilityProfile& profile, const CandidateCombination& comb, const CellLibrary& lib,
                    const CostWeights& w) {
  double total = 0.0;
  for (const auto& node : comb.nodes) {
    const auto [ds, cap] = scalar_attributes(lib.cell(node.cell));
    if (!(ds > 0.0)) throw Error(ErrorKind::kValidation, "cell " + lib.cell(node.cell).name + " has ds <= 0");
    total += w.alpha * profile.sv / ds + w.beta * profile.io * cap + w.gamma * profile.f * ds;
  }
  if (!std::isfinite(total)) throw Error(ErrorKind::kNumeric, "mapping cost overflow");
  return total;
}

CostMatrix build_bipartite(const std::vector<BlockTarget>& blocks, const std::vector<CandidateSet>& sets,
                           const CellLibrary& lib, const CostWeights& w, double min_ds) {
  w.validate();
  CostMatrix m;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t j = 0; j < sets[s].combinations.size(); ++j) m.cols.push_back({static_cast<int>(s), static_cast<int>(j)});
  }
  m.cost = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(blocks.size()), static_cast<Eigen::Index>(m.cols.size()), kInf);
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const auto& b = blocks[r];
    m.rows.push_back(b.block_id);
    bool any = false;
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      const auto& comb = sets[m.cols[c].first].combinations[m.cols[c].second];
      if (comb.num_inputs != b.table.num_inputs() || static_cast<int>(comb.outputs.size()) != b.table.num_outputs()) continue;
      if (!equivalent_exhaustive(evaluate(comb, lib), b.table)) continue;
      bool weak = false;
      for (const auto& node : comb.nodes) weak = weak || lib.cell(node.cell).ds < min_ds;
      if (weak) continue;
      m.cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = mapping_cost(b.profile, comb, lib, w);
      any = true;
    }
    if (!any) throw Error(ErrorKind::kInfeasible, "block " + std::to_string(b.block_id) + " has no feasible candidate");
  }
  return m;
}

Assignment hungarian(const Eigen::MatrixXd& cost) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  if (rows == 0) return {};
  if (cols < rows) throw Error(ErrorKind::kInfeasible, "fewer columns than rows");
  double max_finite = 0.0;
  double span = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    bool any = false;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = cost(i, j);
      if (std::isnan(v)) throw Error(ErrorKind::kNumeric, "NaN in cost matrix");
      if (std::isfinite(v)) {
        any = true;
        max_finite = std::max(max_finite, std::abs(v));
      }
    }
    if (!any) throw Error(ErrorKind::kInfeasible, "row " + std::to_string(i) + " has no finite entry");
  }
  const double sentinel = 10.0 * (max_finite > 0.0 ? max_finite : 1.0);
  span = sentinel * static_cast<double>(cols + 1);
  const Eigen::Index n = cols;
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, sentinel);
  a.topRows(rows) = cost.unaryExpr([&](double v) { return std::isfinite(v) ? v : span; });

  // Potentials method, 1-based with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      double delta = kInf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Assignment out;
  out.row_to_col.assign(static_cast<std::size_t>(rows), -1);
  for (Eigen::Index j = 1; j <= n; ++j) {
    if (p[j] >= 1 && p[j] <= rows) out.row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double c = cost(i, out.row_to_col[i]);
    if (!std::isfinite(c)) throw Error(ErrorKind::kInfeasible, "no feasible perfect assignment");
    out.total += c;
  }
  return out;
}

std::string_view to_string(SolveMode mode) { return mode == SolveMode::kExclusive ? "exclusive" : "replicated"; }

SolveMode parse_solve_mode(std::string_view text) {
  if (text == "replicated") return SolveMode::kReplicated;
  if (text == "exclusive") return SolveMode::kExclusive;
  throw Error(ErrorKind::kValidation, "mode must be replicated or exclusive");
}

MappingSolution solve_mapping(const std::vector<BlockTarget>& blocks, const std::vector<CandidateSet>& sets,
                              const CellLibrary& lib, const CostWeights& w, SolveMode mode, double min_ds) {
  const CostMatrix m = build_bipartite(blocks, sets, lib, w, min_ds);
  std::vector<int> choice(blocks.size(), -1);
  if (mode == SolveMode::kReplicated) {
    for (Eigen::Index r = 0; r < m.cost.rows(); ++r) {
      Eigen::Index best;
      m.cost.row(r).minCoeff(&best);  // first minimum on ties
      choice[r] = static_cast<int>(best);
    }
  } else {
    choice = hungarian(m.cost).row_to_col;
  }
  MappingSolution sol;
  sol.mode = mode;
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    const auto col = m.cols[choice[r]];
    MappedBlock mb{sets[col.first].combinations[col.second], m.cost(static_cast<Eigen::Index>(r), choice[r]), col};
    mb.comb.table = blocks[r].table;
    sol.total_cost += mb.cost;
    sol.assignment[blocks[r].block_id] = std::move(mb);
  }
  return sol;
}

}  // namespace scmap
