#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isosdp/clique_sdp.hpp"
#include "isosdp/compat.hpp"
#include "isosdp/graph.hpp"
#include "isosdp/oracle.hpp"
#include "isosdp/sdp.hpp"
#include "isosdp/theta.hpp"

namespace isosdp {

/// Orders above this run but are outside the tested envelope.
inline constexpr std::size_t kDeskScaleOrder = 8;
inline constexpr std::size_t kDefaultMaxOrder = 12;
/// Margin above n(n-1) before a non-isomorphic pair counts against the gap bound.
inline constexpr double kGapBoundMargin = 1e-3;

/// Largest order decide() accepts; ISOSDP_MAX_N overrides the default.
inline std::size_t max_supported_order() {
  if (const char* env = std::getenv("ISOSDP_MAX_N")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxOrder;
}

struct DeciderConfig {
  SolverConfig solver;
  /// Defaults to n^2 - n/2.
  std::optional<double> tau;
  bool prefilter = true;
  bool extraction = true;
  /// Defaults to on for n <= 8.
  std::optional<bool> oracle_check;
  /// Degree-sequence short circuit; off so the SDP path is exercised.
  bool shortcuts = false;
  /// Keep the full relaxation solution (X, y, S) in the report.
  bool keep_solution = false;

  double resolved_tau(std::size_t n) const {
    const double nn = static_cast<double>(n);
    const double t = tau.value_or(nn * nn - nn / 2.0);
    if (!(t > nn * (nn - 1.0) && t < nn * nn)) {
      throw std::invalid_argument("threshold tau must lie in (n(n-1), n^2) = (" + std::to_string(nn * (nn - 1.0)) +
                                  ", " + std::to_string(nn * nn) + ")");
    }
    return t;
  }
};

enum class Verdict { NonIsomorphicCertified, IsomorphicCertified, IsomorphicClaimed, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::NonIsomorphicCertified: return "NonIsomorphicCertified";
    case Verdict::IsomorphicCertified: return "IsomorphicCertified";
    case Verdict::IsomorphicClaimed: return "IsomorphicClaimed";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

inline Verdict verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::NonIsomorphicCertified, Verdict::IsomorphicCertified, Verdict::IsomorphicClaimed,
                 Verdict::Inconclusive})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

struct SolverDiagnostics {
  SolveStatus status = SolveStatus::NumericalFailure;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  std::string message;

  static SolverDiagnostics from(const SdpSolution& s) {
    return {s.status, s.relative_gap, s.primal_residual, s.dual_residual, s.dual_objective, s.iterations, s.message};
  }
};

struct StageTimes {
  double compat = 0.0;
  double prefilter = 0.0;
  double sdp = 0.0;
  double extraction = 0.0;
  double oracle = 0.0;
  double total = 0.0;
};

struct DecisionReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  std::size_t n = 0;
  std::optional<double> value;
  double tau = 0.0;
  std::optional<double> margin;
  std::optional<double> theta;
  std::optional<PrefilterVerdict> prefilter;
  bool prefilter_flagged = false;
  std::optional<Permutation> mapping;
  bool verified = false;
  std::optional<bool> oracle_isomorphic;
  /// Oracle says non-isomorphic but the SDP value exceeds n(n-1) + 1e-3.
  bool gap_bound_exceeded = false;
  std::optional<SolverDiagnostics> solver;
  /// Present only with DeciderConfig::keep_solution.
  std::optional<SdpSolution> solution;
  StageTimes times;
  std::vector<std::string> warnings;
};

/// True iff p preserves adjacency and non-adjacency on all C(n, 2) pairs.
inline bool verify_mapping(const Graph& g1, const Graph& g2, const Permutation& p) {
  if (p.size() != g1.order() || g1.order() != g2.order())
    throw std::invalid_argument("mapping length does not match graph orders");
  const std::size_t n = g1.order();
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      if (g1.has_edge(a, b) != g2.has_edge(p(a), p(b))) return false;
  return true;
}

/// Rounds a relaxation optimum to a candidate mapping. Partitions are seeded
/// in decreasing order of their largest diagonal entry; each takes its
/// highest-diagonal vertex whose image is unused and whose entries against
/// earlier picks reach 0.9/d, where d = round(n / max diag) estimates the
/// clique count. Dead ends backtrack within a budget of 10n placements. The
/// result is a bijection but is not verified here.
inline std::optional<Permutation> extract_mapping(const SymMatrix& x, const CompatibilityGraph& gc) {
  const std::size_t n = gc.n();
  const std::size_t m = gc.vertex_count();
  if (x.dim() != m) throw std::invalid_argument("matrix dimension does not match the compatibility graph");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, x(i, i));
  if (!(max_diag > 0.0)) return std::nullopt;
  const double d_hat = std::max(1.0, std::round(static_cast<double>(n) / max_diag));
  const double threshold = 0.9 / d_hat;

  std::vector<std::vector<std::size_t>> ranked(n);
  std::vector<double> part_max(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& r = ranked[v];
    r.resize(n);
    std::iota(r.begin(), r.end(), v * n);
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) { return x(a, a) > x(b, b); });
    part_max[v] = x(r.front(), r.front());
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return part_max[a] > part_max[b]; });

  std::vector<std::size_t> chosen;
  std::vector<bool> image_used(n, false);
  std::size_t budget = 10 * n;
  auto recurse = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == n) return true;
    for (std::size_t cand : ranked[order[depth]]) {
      const std::size_t u = cand % n;
      if (image_used[u] || !(x(cand, cand) > 0.0)) continue;
      bool ok = true;
      for (auto c : chosen) ok = ok && x(cand, c) >= threshold;
      if (!ok) continue;
      if (budget == 0) return false;
      --budget;
      image_used[u] = true;
      chosen.push_back(cand);
      if (self(self, depth + 1)) return true;
      chosen.pop_back();
      image_used[u] = false;
      if (budget == 0) return false;
    }
    return false;
  };
  if (!recurse(recurse, 0)) return std::nullopt;
  std::vector<Vertex> map(n);
  for (auto c : chosen) map[c / n] = c % n;
  return Permutation(std::move(map));
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// compat -> theta prefilter -> clique relaxation -> threshold -> extraction
/// -> verification, with an optional oracle cross-check.
inline DecisionReport decide(const Graph& g1, const Graph& g2, const DeciderConfig& cfg = {}) {
  detail::Stopwatch total;
  DecisionReport rep;
  rep.n = g1.order();
  auto done = [&]() -> DecisionReport {
    rep.times.total = total.seconds();
    return rep;
  };

  if (g1.order() != g2.order()) {
    rep.verdict = Verdict::NonIsomorphicCertified;
    rep.reason = "order mismatch";
    return done();
  }
  const std::size_t n = g1.order();
  const double nn = static_cast<double>(n);
  rep.tau = cfg.resolved_tau(n);
  if (n > max_supported_order()) {
    throw std::length_error("order " + std::to_string(n) + " exceeds the supported maximum " +
                            std::to_string(max_supported_order()) + " (set ISOSDP_MAX_N to override)");
  }
  if (n > kDeskScaleOrder)
    rep.warnings.push_back("order " + std::to_string(n) + " is above the desk-scale envelope; expect long solves");

  const bool run_oracle = cfg.oracle_check.value_or(n <= kDeskScaleOrder) && n <= kOracleMaxOrder;
  auto cross_check = [&] {
    if (!run_oracle) return;
    detail::Stopwatch sw;
    rep.oracle_isomorphic = are_isomorphic(g1, g2);
    rep.times.oracle = sw.seconds();
    if (rep.value && !*rep.oracle_isomorphic && *rep.value > nn * (nn - 1.0) + kGapBoundMargin)
      rep.gap_bound_exceeded = true;
  };

  if (cfg.shortcuts && g1.degree_sequence() != g2.degree_sequence()) {
    rep.verdict = Verdict::NonIsomorphicCertified;
    rep.reason = "degree sequence mismatch";
    cross_check();
    return done();
  }

  detail::Stopwatch sw_compat;
  const auto gc = build_compatibility(g1, g2);
  rep.times.compat = sw_compat.seconds();

  if (cfg.prefilter) {
    detail::Stopwatch sw;
    auto pf = theta_prefilter(gc, cfg.solver);
    rep.times.prefilter = sw.seconds();
    rep.theta = pf.theta;
    rep.prefilter = pf.verdict;
    rep.prefilter_flagged = pf.solver_failed;
    if (pf.solver_failed)
      rep.warnings.push_back("theta prefilter solve ended with status " + std::string(to_string(pf.solution.status)));
    if (pf.verdict == PrefilterVerdict::FailsNecessaryCondition) {
      rep.verdict = Verdict::NonIsomorphicCertified;
      rep.reason = "theta prefilter below n";
      cross_check();
      return done();
    }
  }

  detail::Stopwatch sw_sdp;
  const auto sol = solve(build_clique_sdp(gc), cfg.solver);
  rep.times.sdp = sw_sdp.seconds();
  rep.solver = SolverDiagnostics::from(sol);
  rep.value = sol.primal_objective;
  rep.margin = sol.primal_objective - rep.tau;
  if (cfg.keep_solution) rep.solution = sol;

  if (sol.status != SolveStatus::Optimal) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "solver ended with status " + std::string(to_string(sol.status));
    cross_check();
    return done();
  }
  if (*rep.value < rep.tau) {
    rep.verdict = Verdict::NonIsomorphicCertified;
    rep.reason = "relaxation value below threshold";
    cross_check();
    return done();
  }

  rep.verdict = Verdict::IsomorphicClaimed;
  rep.reason = "relaxation value at or above threshold";
  if (cfg.extraction) {
    detail::Stopwatch sw;
    rep.mapping = extract_mapping(sol.x.dense, gc);
    if (rep.mapping) rep.verified = verify_mapping(g1, g2, *rep.mapping);
    rep.times.extraction = sw.seconds();
    if (rep.verified) {
      rep.verdict = Verdict::IsomorphicCertified;
      rep.reason = "extracted mapping verified";
    } else {
      rep.reason = rep.mapping ? "extracted mapping failed verification" : "no mapping extracted";
    }
  }
  cross_check();
  return done();
}

}  // namespace isosdp
