#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isosdp/graph.hpp"

namespace isosdp {

/// Compatibility (association) graph of two order-n graphs. Vertex (v, u) of
/// V1 x V2 is stored at index v*n + u, so the partition {v} x V2 is the
/// contiguous block [v*n, v*n + n).
class CompatibilityGraph {
 public:
  CompatibilityGraph(std::size_t n, Graph graph) : n_(n), graph_(std::move(graph)) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t vertex_count() const noexcept { return n_ * n_; }
  const Graph& graph() const noexcept { return graph_; }
  bool adjacent(std::size_t a, std::size_t b) const noexcept { return graph_.has_edge(a, b); }

  std::size_t index_of(Vertex v, Vertex u) const {
    if (v >= n_ || u >= n_) throw std::out_of_range("pair coordinate out of range");
    return v * n_ + u;
  }

  std::size_t partition_of(std::size_t index) const {
    if (index >= vertex_count()) {
      throw std::out_of_range("compatibility index " + std::to_string(index) + " out of range");
    }
    return index / n_;
  }

  /// Second coordinate (the V2 vertex) of a pair index.
  std::size_t image_of(std::size_t index) const {
    if (index >= vertex_count()) {
      throw std::out_of_range("compatibility index " + std::to_string(index) + " out of range");
    }
    return index % n_;
  }

 private:
  std::size_t n_;
  Graph graph_;
};

/// Edge between (v1,u1) and (v2,u2) iff v1 != v2, u1 != u2 and the pairs agree
/// on adjacency: both edges or both non-edges.
inline CompatibilityGraph build_compatibility(const Graph& g1, const Graph& g2) {
  if (g1.order() != g2.order()) {
    throw std::invalid_argument("compatibility graph needs equal orders, got " +
                                std::to_string(g1.order()) + " and " + std::to_string(g2.order()));
  }
  const std::size_t n = g1.order();
  std::vector<Edge> es;
  for (Vertex v1 = 0; v1 < n; ++v1) {
    for (Vertex v2 = v1 + 1; v2 < n; ++v2) {
      const bool e1 = g1.has_edge(v1, v2);
      for (Vertex u1 = 0; u1 < n; ++u1) {
        for (Vertex u2 = 0; u2 < n; ++u2) {
          if (u1 == u2 || e1 != g2.has_edge(u1, u2)) continue;
          es.emplace_back(v1 * n + u1, v2 * n + u2);
        }
      }
    }
  }
  std::string label;
  if (!g1.label().empty() && !g2.label().empty()) label = "compat(" + g1.label() + "," + g2.label() + ")";
  return CompatibilityGraph(n, Graph(n * n, es, label));
}

/// Closed-form edge count: 2 * (|E1||E2| + (C(n,2)-|E1|)(C(n,2)-|E2|)).
inline std::size_t expected_compat_edge_count(const Graph& g1, const Graph& g2) {
  const std::size_t pairs = g1.order() * (g1.order() - 1) / 2;
  const std::size_t e1 = g1.edge_count(), e2 = g2.edge_count();
  return 2 * (e1 * e2 + (pairs - e1) * (pairs - e2));
}

}  // namespace isosdp
