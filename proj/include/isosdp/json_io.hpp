#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isosdp/decider.hpp"
#include "isosdp/graph_io.hpp"
#include "isosdp/sdp.hpp"
#include "isosdp/theta.hpp"

namespace isosdp {

inline constexpr const char* kSchema = "isosdp/1";

using nlohmann::json;

namespace detail {

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline void require_schema(const json& j) {
  if (j.contains("schema") && j.at("schema") != kSchema)
    throw std::invalid_argument("unsupported schema " + j.at("schema").dump());
}

}  // namespace detail

// SDP problem description:
//   { "schema": "isosdp/1", "blocks": [d1, d2], "b": [...],
//     "C": [[block, i, j, v], ...], "A": [[k, block, i, j, v], ...] }
// Block 0 is the dense PSD block, block 1 the nonnegative diagonal block
// (i == j required). Indices are 0-based; each (i, j) entry sets both
// symmetric positions, and repeated entries add.
inline SdpProblem sdp_problem_from_json(const json& j) {
  detail::require_schema(j);
  const auto blocks = j.at("blocks").get<std::vector<std::size_t>>();
  if (blocks.empty() || blocks.size() > 2) throw std::invalid_argument("blocks must list one or two dimensions");
  const std::size_t d1 = blocks[0], d2 = blocks.size() > 1 ? blocks[1] : 0;
  SdpProblem p(d1, d2);
  const auto b = j.at("b").get<std::vector<double>>();
  p.constraints.resize(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) p.constraints[k].rhs = b[k];

  auto check = [&](std::size_t blk, std::size_t i, std::size_t jj) {
    if (blk > 1) throw std::invalid_argument("block index must be 0 or 1");
    const std::size_t dim = blk == 0 ? d1 : d2;
    if (i >= dim || jj >= dim) throw std::invalid_argument("entry index out of range for its block");
    if (blk == 1 && i != jj) throw std::invalid_argument("diagonal block entries need i == j");
  };
  std::vector<DenseEntry> c_dense;
  for (const auto& t : j.value("C", json::array())) {
    const auto blk = t.at(0).get<std::size_t>(), i = t.at(1).get<std::size_t>(), jj = t.at(2).get<std::size_t>();
    const double v = t.at(3).get<double>();
    check(blk, i, jj);
    if (blk == 0) {
      c_dense.push_back({i, jj, v});
    } else {
      p.objective.diag[i] += v;
    }
  }
  for (const auto& e : normalize_entries(c_dense)) p.objective.dense.add(e.i, e.j, e.value);

  std::vector<std::vector<DenseEntry>> dense(b.size());
  std::vector<std::vector<DiagEntry>> diag(b.size());
  for (const auto& t : j.at("A")) {
    const auto k = t.at(0).get<std::size_t>();
    const auto blk = t.at(1).get<std::size_t>(), i = t.at(2).get<std::size_t>(), jj = t.at(3).get<std::size_t>();
    const double v = t.at(4).get<double>();
    if (k >= b.size()) throw std::invalid_argument("constraint index out of range");
    check(blk, i, jj);
    if (blk == 0) {
      dense[k].push_back({i, jj, v});
    } else {
      diag[k].push_back({i, v});
    }
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    p.constraints[k].dense = normalize_entries(std::move(dense[k]));
    p.constraints[k].diag = normalize_entries(std::move(diag[k]));
  }
  return p;
}

inline json sdp_problem_to_json(const SdpProblem& p) {
  json j;
  j["schema"] = kSchema;
  j["blocks"] = {p.dense_dim, p.diag_dim};
  json c = json::array();
  for (std::size_t i = 0; i < p.dense_dim; ++i)
    for (std::size_t k = i; k < p.dense_dim; ++k)
      if (p.objective.dense(i, k) != 0.0) c.push_back({0, i, k, p.objective.dense(i, k)});
  for (std::size_t i = 0; i < p.diag_dim; ++i)
    if (p.objective.diag[i] != 0.0) c.push_back({1, i, i, p.objective.diag[i]});
  j["C"] = std::move(c);
  json a = json::array();
  json b = json::array();
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    for (const auto& e : p.constraints[k].dense) a.push_back({k, 0, e.i, e.j, e.value});
    for (const auto& e : p.constraints[k].diag) a.push_back({k, 1, e.i, e.i, e.value});
    b.push_back(p.constraints[k].rhs);
  }
  j["A"] = std::move(a);
  j["b"] = std::move(b);
  return j;
}

inline json sdp_solution_to_json(const SdpSolution& s, bool include_iterates = false) {
  json j;
  j["schema"] = kSchema;
  j["status"] = std::string(to_string(s.status));
  j["value"] = s.primal_objective;
  j["primal_objective"] = s.primal_objective;
  j["dual_objective"] = s.dual_objective;
  j["gap"] = s.relative_gap;
  j["primal_residual"] = s.primal_residual;
  j["dual_residual"] = s.dual_residual;
  j["iterations"] = s.iterations;
  j["message"] = s.message;
  if (include_iterates) {
    const std::size_t m = s.x.dense.dim();
    json x = json::array();
    for (std::size_t i = 0; i < m; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < m; ++k) row.push_back(s.x.dense(i, k));
      x.push_back(std::move(row));
    }
    j["X"] = std::move(x);
    j["X_diag"] = s.x.diag;
    j["y"] = s.y;
  }
  return j;
}

inline json solver_diagnostics_to_json(const SolverDiagnostics& d) {
  return {{"status", std::string(to_string(d.status))},
          {"gap", d.relative_gap},
          {"iters", d.iterations},
          {"primal_residual", d.primal_residual},
          {"dual_residual", d.dual_residual},
          {"dual_objective", d.dual_objective},
          {"message", d.message}};
}

inline json decision_report_to_json(const DecisionReport& r) {
  json j;
  j["schema"] = kSchema;
  j["verdict"] = std::string(to_string(r.verdict));
  j["reason"] = r.reason;
  j["n"] = r.n;
  j["value"] = detail::optional_number(r.value);
  j["tau"] = r.tau;
  j["margin"] = detail::optional_number(r.margin);
  j["theta"] = detail::optional_number(r.theta);
  j["prefilter"] = r.prefilter ? json(std::string(to_string(*r.prefilter))) : json(nullptr);
  j["prefilter_flagged"] = r.prefilter_flagged;
  j["mapping"] = r.mapping ? json(r.mapping->mapping()) : json(nullptr);
  j["verified"] = r.verified;
  j["oracle"] = r.oracle_isomorphic ? json(*r.oracle_isomorphic ? "isomorphic" : "non-isomorphic") : json(nullptr);
  j["gap_bound_exceeded"] = r.gap_bound_exceeded;
  j["timings"] = {{"compat", r.times.compat},   {"prefilter", r.times.prefilter},
                  {"sdp", r.times.sdp},         {"extraction", r.times.extraction},
                  {"oracle", r.times.oracle},   {"total", r.times.total}};
  j["solver"] = r.solver ? solver_diagnostics_to_json(*r.solver) : json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace isosdp
