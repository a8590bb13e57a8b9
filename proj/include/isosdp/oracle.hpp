#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isosdp/compat.hpp"
#include "isosdp/graph.hpp"
#include "isosdp/linalg.hpp"

namespace isosdp {

inline constexpr std::size_t kOracleMaxOrder = 10;
inline constexpr std::size_t kCliqueEnumerationMaxOrder = 8;

namespace detail {

inline void require_oracle_order(std::size_t n, std::size_t limit, const char* what) {
  if (n > limit) {
    throw std::length_error(std::string(what) + ": order " + std::to_string(n) + " exceeds oracle guard " +
                            std::to_string(limit));
  }
}

}  // namespace detail

/// All isomorphisms g1 -> g2 up to cap, by assigning images to 0, 1, ... in
/// order and pruning on degree and on adjacency against earlier assignments.
inline std::vector<Permutation> enumerate_isomorphisms(const Graph& g1, const Graph& g2, std::size_t cap = 1000000) {
  if (g1.order() != g2.order()) throw std::invalid_argument("isomorphism search needs equal orders");
  const std::size_t n = g1.order();
  detail::require_oracle_order(n, kOracleMaxOrder, "enumerate_isomorphisms");
  if (cap == 0) throw std::invalid_argument("cap must be at least 1");
  std::vector<Permutation> out;
  if (g1.edge_count() != g2.edge_count() || g1.degree_sequence() != g2.degree_sequence()) return out;

  std::vector<std::size_t> deg1(n), deg2(n);
  for (Vertex v = 0; v < n; ++v) {
    deg1[v] = g1.degree(v);
    deg2[v] = g2.degree(v);
  }
  std::vector<Vertex> image(n);
  std::vector<bool> used(n, false);
  auto recurse = [&](auto&& self, Vertex v) -> void {
    if (out.size() >= cap) return;
    if (v == n) {
      out.emplace_back(image);
      return;
    }
    for (Vertex u = 0; u < n; ++u) {
      if (used[u] || deg1[v] != deg2[u]) continue;
      bool ok = true;
      for (Vertex w = 0; w < v && ok; ++w) ok = g1.has_edge(v, w) == g2.has_edge(u, image[w]);
      if (!ok) continue;
      used[u] = true;
      image[v] = u;
      self(self, v + 1);
      used[u] = false;
    }
  };
  recurse(recurse, 0);
  return out;
}

inline bool are_isomorphic(const Graph& g1, const Graph& g2) {
  return g1.order() == g2.order() && !enumerate_isomorphisms(g1, g2, 1).empty();
}

struct MaxCliqueResult {
  std::size_t size = 0;
  std::vector<std::size_t> witness;
};

/// Exact clique number of a compatibility graph. Partitions are visited in
/// ascending order and at most one vertex is taken from each, so the search
/// depth is n.
inline MaxCliqueResult max_clique(const CompatibilityGraph& gc) {
  const std::size_t n = gc.n();
  detail::require_oracle_order(n, kOracleMaxOrder, "max_clique");
  const std::size_t m = gc.vertex_count();
  const std::size_t words = (m + 63) / 64;
  MaxCliqueResult best;
  std::vector<std::size_t> current;

  auto bit = [](const std::vector<std::uint64_t>& mask, std::size_t i) { return (mask[i / 64] >> (i % 64)) & 1u; };
  auto recurse = [&](auto&& self, std::size_t part, const std::vector<std::uint64_t>& cand) -> void {
    if (best.size == n) return;
    std::size_t reachable = 0;
    for (std::size_t p = part; p < n; ++p)
      for (std::size_t u = 0; u < n; ++u)
        if (bit(cand, p * n + u)) {
          ++reachable;
          break;
        }
    if (current.size() + reachable <= best.size) return;
    if (part == n) {
      best.size = current.size();
      best.witness = current;
      return;
    }
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t idx = part * n + u;
      if (!bit(cand, idx)) continue;
      std::vector<std::uint64_t> next(words);
      const auto row = gc.graph().row(idx);
      for (std::size_t w = 0; w < words; ++w) next[w] = cand[w] & row[w];
      current.push_back(idx);
      self(self, part + 1, next);
      current.pop_back();
      if (best.size == n) return;
    }
    self(self, part + 1, cand);
  };
  std::vector<std::uint64_t> all(words, 0);
  for (std::size_t i = 0; i < m; ++i) all[i / 64] |= std::uint64_t{1} << (i % 64);
  recurse(recurse, 0, all);
  return best;
}

/// Order-n cliques of a compatibility graph, each listed one vertex per
/// partition in ascending partition order.
struct CliqueSet {
  std::vector<std::vector<std::size_t>> cliques;
  bool truncated = false;
  std::size_t count() const noexcept { return cliques.size(); }
};

inline CliqueSet enumerate_n_cliques(const CompatibilityGraph& gc, std::size_t cap = 10000) {
  const std::size_t n = gc.n();
  detail::require_oracle_order(n, kCliqueEnumerationMaxOrder, "enumerate_n_cliques");
  CliqueSet out;
  std::vector<std::size_t> current;
  auto recurse = [&](auto&& self, std::size_t part) -> void {
    if (out.truncated) return;
    if (part == n) {
      if (out.cliques.size() >= cap) {
        out.truncated = true;
        return;
      }
      out.cliques.push_back(current);
      return;
    }
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t idx = part * n + u;
      bool ok = true;
      for (auto c : current) ok = ok && gc.adjacent(c, idx);
      if (!ok) continue;
      current.push_back(idx);
      self(self, part + 1);
      current.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

/// True when clique has one vertex in each partition and is pairwise adjacent.
inline bool is_full_clique(const CompatibilityGraph& gc, const std::vector<std::size_t>& clique) {
  const std::size_t n = gc.n();
  if (clique.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto v : clique) {
    if (v >= gc.vertex_count()) return false;
    const auto p = gc.partition_of(v);
    if (seen[p]) return false;
    seen[p] = true;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!gc.adjacent(clique[a], clique[b])) return false;
  return true;
}

/// X = x x^T with x the 0/1 indicator of the clique.
inline SymMatrix build_rank1_solution(const CompatibilityGraph& gc, const std::vector<std::size_t>& clique) {
  if (!is_full_clique(gc, clique)) throw std::invalid_argument("not an order-n clique of the compatibility graph");
  SymMatrix x(gc.vertex_count());
  for (auto a : clique)
    for (auto b : clique) x.set(a, b, 1.0);
  return x;
}

struct MultiCliqueSolution {
  Matrix u;  // m x d, row i is the vector representation of vertex i
  SymMatrix x;
};

/// One coordinate per clique; vertex i gets 1/sqrt(d) in the coordinate of
/// every clique it belongs to, and X = U U^T. X is filled from clique
/// co-membership counts so its entries are exact multiples of 1/d.
inline MultiCliqueSolution build_multiclique_solution(const CompatibilityGraph& gc, const CliqueSet& cliques) {
  if (cliques.truncated) throw std::invalid_argument("clique set is truncated");
  const std::size_t d = cliques.count();
  if (d == 0) throw std::invalid_argument("clique set is empty");
  for (const auto& c : cliques.cliques)
    if (!is_full_clique(gc, c)) throw std::invalid_argument("clique set contains an invalid clique");
  MultiCliqueSolution out;
  out.u = Matrix(gc.vertex_count(), d);
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (auto v : cliques.cliques[j]) out.u(v, j) = w;
  Matrix shared(gc.vertex_count(), gc.vertex_count());
  for (const auto& c : cliques.cliques)
    for (auto a : c)
      for (auto b : c) shared(a, b) += 1.0;
  for (std::size_t i = 0; i < shared.rows(); ++i)
    for (std::size_t j = 0; j < shared.cols(); ++j) shared(i, j) /= static_cast<double>(d);
  out.x = SymMatrix(shared);
  return out;
}

struct FeasibilityReport {
  double trace_residual = 0.0;
  double max_nonedge_abs = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> worst_nonedge;
  double max_cap_excess = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> worst_cap;
  double min_eigenvalue = 0.0;
  bool pass = false;
};

/// Residuals of X against the clique relaxation constraints with trace target t.
inline FeasibilityReport check_feasibility(const SymMatrix& x, const CompatibilityGraph& gc, double trace_target,
                                           double tol) {
  const std::size_t m = gc.vertex_count();
  if (x.dim() != m) throw std::invalid_argument("matrix dimension does not match the compatibility graph");
  FeasibilityReport r;
  r.trace_residual = std::abs(x.trace() - trace_target);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = x(i, j);
      if (gc.adjacent(i, j)) {
        const double excess = std::max(0.0, v - 1.0);
        if (excess > r.max_cap_excess) {
          r.max_cap_excess = excess;
          r.worst_cap = {i, j};
        }
      } else if (std::abs(v) > r.max_nonedge_abs) {
        r.max_nonedge_abs = std::abs(v);
        r.worst_nonedge = {i, j};
      }
    }
  }
  r.min_eigenvalue = min_eigenvalue(x);
  r.pass = r.trace_residual <= tol && r.max_nonedge_abs <= tol && r.max_cap_excess <= tol && r.min_eigenvalue >= -tol;
  return r;
}

/// One representative per isomorphism class of graphs on n vertices, found by
/// exhaustive enumeration and pairwise oracle deduplication. n <= 6.
inline std::vector<Graph> graph_representatives(std::size_t n) {
  if (n == 0 || n > 6) throw std::length_error("representative enumeration supports 1 <= n <= 6");
  std::vector<Edge> slots;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) slots.emplace_back(u, v);
  std::vector<Graph> reps;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    std::vector<Edge> es;
    for (std::size_t k = 0; k < slots.size(); ++k)
      if ((mask >> k) & 1u) es.push_back(slots[k]);
    Graph g(n, es);
    bool seen = false;
    for (const auto& r : reps) {
      if (are_isomorphic(g, r)) {
        seen = true;
        break;
      }
    }
    if (!seen) reps.push_back(std::move(g));
  }
  return reps;
}

}  // namespace isosdp
