#pragma once

#include <cstddef>
#include <vector>

#include "isosdp/compat.hpp"
#include "isosdp/sdp.hpp"

namespace isosdp {

/// Order-n clique relaxation over the compatibility graph:
///
///   maximize <J, X>  s.t.  trace(X) = n,
///                          X_ij = 0        for non-adjacent i != j,
///                          X_ij + s_e = 1  for each edge e = (i, j), s_e >= 0,
///                          X PSD.
///
/// The diagonal block holds one slack per edge, in the order of
/// gc.graph().edges(). With with_caps = false the edge rows are omitted and
/// the problem reduces to n times the theta problem of the complement.
inline SdpProblem build_clique_sdp(const CompatibilityGraph& gc, bool with_caps = true) {
  const std::size_t m = gc.vertex_count();
  const auto edges = gc.graph().edges();
  SdpProblem p(m, with_caps ? edges.size() : 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) p.objective.dense.set(i, j, 1.0);

  SdpConstraint trace;
  for (std::size_t i = 0; i < m; ++i) trace.dense.push_back({i, i, 1.0});
  trace.rhs = static_cast<double>(gc.n());
  p.constraints.push_back(std::move(trace));

  std::size_t slack = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const bool edge = gc.adjacent(i, j);
      if (edge && !with_caps) continue;
      SdpConstraint c;
      c.dense.push_back({i, j, 0.5});
      if (edge) {
        c.diag.push_back({slack++, 1.0});
        c.rhs = 1.0;
      }
      p.constraints.push_back(std::move(c));
    }
  }
  return p;
}

/// <J, X> for a dense symmetric X.
inline double sum_of_entries(const SymMatrix& x) {
  double s = 0.0;
  for (double v : x.dense().data()) s += v;
  return s;
}

}  // namespace isosdp
