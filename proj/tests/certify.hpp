#pragma once

// Independent re-check of a solver result: residuals are recomputed from the
// problem data and the PSD test uses the eigen solver, not the solver's own
// bookkeeping.

#include <algorithm>
#include <cmath>
#include <string>

#include "isosdp/linalg.hpp"
#include "isosdp/sdp.hpp"

namespace isosdp::testing {

struct Certificate {
  double min_eig = 0.0;
  double psd_bound = 0.0;
  double min_diag = 0.0;
  double worst_residual = 0.0;  // max_k |<A_k,X> - b_k| / (1 + |b_k|)
  double gap = 0.0;
  double duality_excess = 0.0;  // primal - dual - tol (1 + |dual|), should be <= 0
  bool pass = false;
  std::string failure;
};

inline Certificate certify(const SdpProblem& p, const SdpSolution& s, double feas_tol = 1e-7, double gap_tol = 1e-7) {
  Certificate c;
  const double xn = frobenius_norm(s.x.dense.dense());
  c.min_eig = min_eigenvalue(s.x.dense);
  c.psd_bound = -1e-7 * (1.0 + xn);
  c.min_diag = s.x.diag.empty() ? 0.0 : *std::min_element(s.x.diag.begin(), s.x.diag.end());
  for (const auto& a : p.constraints) {
    double v = 0.0;
    for (const auto& e : a.dense) v += (e.i == e.j ? 1.0 : 2.0) * e.value * s.x.dense(e.i, e.j);
    for (const auto& e : a.diag) v += e.value * s.x.diag[e.i];
    c.worst_residual = std::max(c.worst_residual, std::abs(v - a.rhs) / (1.0 + std::abs(a.rhs)));
  }
  const double primal = inner(p.objective.dense, s.x.dense) +
                        [&] {
                          double t = 0.0;
                          for (std::size_t i = 0; i < p.diag_dim; ++i) t += p.objective.diag[i] * s.x.diag[i];
                          return t;
                        }();
  c.gap = s.relative_gap;
  c.duality_excess = primal - s.dual_objective - gap_tol * (1.0 + std::abs(s.dual_objective));
  if (c.min_eig < c.psd_bound) c.failure = "min eigenvalue " + std::to_string(c.min_eig);
  if (c.min_diag < c.psd_bound) c.failure = "negative slack " + std::to_string(c.min_diag);
  if (c.worst_residual > feas_tol) c.failure = "equality residual " + std::to_string(c.worst_residual);
  if (!(c.gap <= gap_tol)) c.failure = "relative gap " + std::to_string(c.gap);
  if (c.duality_excess > 0.0) c.failure = "weak duality excess " + std::to_string(c.duality_excess);
  if (std::abs(primal - s.primal_objective) > 1e-9 * (1.0 + std::abs(primal)))
    c.failure = "reported objective differs from recomputed value";
  c.pass = c.failure.empty();
  return c;
}

}  // namespace isosdp::testing
