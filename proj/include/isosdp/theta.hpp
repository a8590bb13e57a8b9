#pragma once

#include <cstddef>
#include <string_view>

#include "isosdp/compat.hpp"
#include "isosdp/graph.hpp"
#include "isosdp/sdp.hpp"

namespace isosdp {

/// Theta SDP of g: maximize <J, X> s.t. trace(X) = 1, X_ij = 0 on edges of g, X PSD.
inline SdpProblem build_theta_sdp(const Graph& g) {
  const std::size_t k = g.order();
  SdpProblem p(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) p.objective.dense.set(i, j, 1.0);
  SdpConstraint trace;
  for (std::size_t i = 0; i < k; ++i) trace.dense.push_back({i, i, 1.0});
  trace.rhs = 1.0;
  p.constraints.push_back(std::move(trace));
  for (const auto& [u, v] : g.edges()) {
    SdpConstraint c;
    c.dense.push_back({u, v, 0.5});
    p.constraints.push_back(std::move(c));
  }
  return p;
}

struct ThetaResult {
  double value = 0.0;
  SdpSolution solution;
  bool ok() const noexcept { return solution.status == SolveStatus::Optimal; }
};

/// Lovasz number of g; value is the primal objective of the returned solve,
/// which also carries status and residuals when the solver did not converge.
inline ThetaResult lovasz_theta(const Graph& g, const SolverConfig& cfg = {}) {
  ThetaResult r;
  r.solution = solve(build_theta_sdp(g), cfg);
  r.value = r.solution.primal_objective;
  return r;
}

enum class PrefilterVerdict { PassesNecessaryCondition, FailsNecessaryCondition };

inline std::string_view to_string(PrefilterVerdict v) {
  return v == PrefilterVerdict::PassesNecessaryCondition ? "PassesNecessaryCondition" : "FailsNecessaryCondition";
}

inline constexpr double kPrefilterMargin = 1e-4;

struct PrefilterResult {
  double theta = 0.0;
  PrefilterVerdict verdict = PrefilterVerdict::PassesNecessaryCondition;
  /// Set when the solve did not reach Optimal; the verdict is then Passes.
  bool solver_failed = false;
  SdpSolution solution;
};

/// theta(complement(G_c)) bounds the clique number from above, so a value
/// below n - margin proves that G_c has no n-clique.
inline PrefilterResult theta_prefilter(const CompatibilityGraph& gc, const SolverConfig& cfg = {},
                                       double margin = kPrefilterMargin) {
  PrefilterResult out;
  auto t = lovasz_theta(complement(gc.graph()), cfg);
  out.theta = t.value;
  out.solution = std::move(t.solution);
  if (out.solution.status != SolveStatus::Optimal) {
    out.solver_failed = true;
    return out;
  }
  // The dual objective is a valid upper bound once dual feasible; the primal
  // value agrees with it to within the gap tolerance at optimality.
  if (out.theta < static_cast<double>(gc.n()) - margin) out.verdict = PrefilterVerdict::FailsNecessaryCondition;
  return out;
}

}  // namespace isosdp
