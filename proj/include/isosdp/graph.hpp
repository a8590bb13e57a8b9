#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isosdp {

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph on vertices 0..n-1, stored as dense bitset rows.
/// Immutable once constructed.
class Graph {
 public:
  Graph() : Graph(1) {}

  explicit Graph(std::size_t order, std::span<const Edge> edges = {}, std::string label = {})
      : n_(order), words_((order + 63) / 64), rows_(order * words_, 0), label_(std::move(label)) {
    if (order == 0) throw std::invalid_argument("graph order must be at least 1");
    for (const auto& [u, v] : edges) {
      if (u >= n_ || v >= n_) {
        throw std::out_of_range("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                ") out of range for order " + std::to_string(n_));
      }
      if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
      set(u, v);
      set(v, u);
    }
  }

  Graph(std::size_t order, std::initializer_list<Edge> edges, std::string label = {})
      : Graph(order, std::span<const Edge>(edges.begin(), edges.size()), std::move(label)) {}

  std::size_t order() const noexcept { return n_; }
  const std::string& label() const noexcept { return label_; }
  Graph with_label(std::string label) const {
    Graph g = *this;
    g.label_ = std::move(label);
    return g;
  }

  bool has_edge(Vertex u, Vertex v) const noexcept {
    return (rows_[u * words_ + v / 64] >> (v % 64)) & 1u;
  }

  std::span<const std::uint64_t> row(Vertex u) const noexcept {
    return {rows_.data() + u * words_, words_};
  }

  std::size_t degree(Vertex u) const noexcept {
    std::size_t d = 0;
    for (auto w : row(u)) d += static_cast<std::size_t>(std::popcount(w));
    return d;
  }

  std::size_t edge_count() const noexcept {
    std::size_t twice = 0;
    for (Vertex u = 0; u < n_; ++u) twice += degree(u);
    return twice / 2;
  }

  /// Edges as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v = u + 1; v < n_; ++v)
        if (has_edge(u, v)) out.emplace_back(u, v);
    return out;
  }

  std::vector<std::size_t> degree_sequence() const {
    std::vector<std::size_t> d(n_);
    for (Vertex u = 0; u < n_; ++u) d[u] = degree(u);
    std::sort(d.begin(), d.end());
    return d;
  }

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.n_ == b.n_ && a.rows_ == b.rows_;
  }

 private:
  void set(Vertex u, Vertex v) noexcept { rows_[u * words_ + v / 64] |= std::uint64_t{1} << (v % 64); }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> rows_;
  std::string label_;
};

/// Bijection on {0, ..., n-1}; image(v) is where v is sent.
class Permutation {
 public:
  explicit Permutation(std::vector<Vertex> mapping) : map_(std::move(mapping)) {
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
      if (v >= map_.size() || seen[v]) throw std::invalid_argument("mapping is not a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<Vertex> m(n);
    std::iota(m.begin(), m.end(), Vertex{0});
    return Permutation(std::move(m));
  }

  std::size_t size() const noexcept { return map_.size(); }
  Vertex operator()(Vertex v) const { return map_.at(v); }
  const std::vector<Vertex>& mapping() const noexcept { return map_; }

  Permutation inverse() const {
    std::vector<Vertex> inv(map_.size());
    for (Vertex v = 0; v < map_.size(); ++v) inv[map_[v]] = v;
    return Permutation(std::move(inv));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Vertex> map_;
};

inline Graph complement(const Graph& g) {
  std::vector<Edge> es;
  for (Vertex u = 0; u < g.order(); ++u)
    for (Vertex v = u + 1; v < g.order(); ++v)
      if (!g.has_edge(u, v)) es.emplace_back(u, v);
  return Graph(g.order(), es, g.label().empty() ? std::string{} : "co-" + g.label());
}

/// Relabels g so that (p(u), p(v)) is an edge iff (u, v) is.
inline Graph apply_permutation(const Graph& g, const Permutation& p) {
  if (p.size() != g.order()) {
    throw std::invalid_argument("permutation length " + std::to_string(p.size()) +
                                " does not match graph order " + std::to_string(g.order()));
  }
  std::vector<Edge> es;
  for (const auto& [u, v] : g.edges()) es.emplace_back(p(u), p(v));
  return Graph(g.order(), es, g.label());
}

namespace detail {

// Portable draws from a 64-bit Mersenne twister; the standard distributions are
// implementation-defined, which would break cross-platform corpus determinism.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t index_draw(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

}  // namespace detail

/// G(n, p): each unordered pair independently with probability p.
inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
  std::vector<Edge> es;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (detail::unit_draw(rng) < p) es.emplace_back(u, v);
  return Graph(n, es);
}

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_graph(n, p, rng);
}

inline Permutation random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<Vertex> m(n);
  std::iota(m.begin(), m.end(), Vertex{0});
  for (std::size_t i = n; i > 1; --i) std::swap(m[i - 1], m[detail::index_draw(rng, i)]);
  return Permutation(std::move(m));
}

// Named families.

inline Graph empty_graph(std::size_t n) { return Graph(n, {}, "E" + std::to_string(n)); }

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> es;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) es.emplace_back(u, v);
  return Graph(n, es, "K" + std::to_string(n));
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> es;
  for (Vertex u = 0; u + 1 < n; ++u) es.emplace_back(u, u + 1);
  return Graph(n, es, "P" + std::to_string(n));
}

inline Graph cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
  std::vector<Edge> es;
  for (Vertex u = 0; u < n; ++u) es.emplace_back(u, (u + 1) % n);
  return Graph(n, es, "C" + std::to_string(n));
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<Edge> es = a.edges();
  for (const auto& [u, v] : b.edges()) es.emplace_back(u + a.order(), v + a.order());
  std::string label;
  if (!a.label().empty() && !b.label().empty()) label = a.label() + "+" + b.label();
  return Graph(a.order() + b.order(), es, label);
}

inline Graph remove_edge(const Graph& g, Vertex u, Vertex v) {
  std::vector<Edge> es;
  for (const auto& e : g.edges())
    if (!(e == Edge{std::min(u, v), std::max(u, v)})) es.push_back(e);
  return Graph(g.order(), es);
}

}  // namespace isosdp
