#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isosdp/linalg.hpp"

namespace isosdp {

/// Symmetric entry of the dense block: A(i, j) = A(j, i) = value.
struct DenseEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

struct DiagEntry {
  std::size_t i = 0;
  double value = 0.0;
};

/// Element of the cone space: one dense symmetric block and one diagonal block.
struct BlockMatrix {
  SymMatrix dense;
  std::vector<double> diag;

  BlockMatrix() = default;
  BlockMatrix(std::size_t dense_dim, std::size_t diag_dim) : dense(dense_dim), diag(diag_dim, 0.0) {}

  static BlockMatrix identity(std::size_t dense_dim, std::size_t diag_dim, double scale = 1.0) {
    BlockMatrix b(dense_dim, diag_dim);
    for (std::size_t i = 0; i < dense_dim; ++i) b.dense.set(i, i, scale);
    std::fill(b.diag.begin(), b.diag.end(), scale);
    return b;
  }

  friend bool operator==(const BlockMatrix&, const BlockMatrix&) = default;
};

inline double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = inner(a.dense, b.dense);
  for (std::size_t i = 0; i < a.diag.size(); ++i) s += a.diag[i] * b.diag[i];
  return s;
}

inline double norm(const BlockMatrix& a) { return std::sqrt(inner(a, a)); }

/// Linear equality <A, X> = rhs over the block cone.
struct SdpConstraint {
  std::vector<DenseEntry> dense;
  std::vector<DiagEntry> diag;
  double rhs = 0.0;
};

/// maximize <C, X>  s.t.  <A_k, X> = b_k,  X = (dense, diag) in PSD x R+^d2.
struct SdpProblem {
  std::size_t dense_dim = 0;
  std::size_t diag_dim = 0;
  BlockMatrix objective;
  std::vector<SdpConstraint> constraints;

  SdpProblem() = default;
  SdpProblem(std::size_t dense, std::size_t diag) : dense_dim(dense), diag_dim(diag), objective(dense, diag) {}
};

struct SolverConfig {
  double gap_tol = 1e-7;
  double feas_tol = 1e-7;
  std::size_t max_iterations = 200;
  double step_fraction = 0.98;
  bool predictor_corrector = true;

  void validate() const {
    if (!(step_fraction > 0.0 && step_fraction < 1.0))
      throw std::invalid_argument("step fraction must lie in (0, 1)");
    if (!(gap_tol > 0.0) || !(feas_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  }
};

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  BlockMatrix x;
  std::vector<double> y;
  BlockMatrix s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = std::numeric_limits<double>::infinity();
  /// max_k |<A_k, X> - b_k| / (1 + |b_k|)
  double primal_residual = std::numeric_limits<double>::infinity();
  /// ||C - A^T y + S|| / (1 + ||C||)
  double dual_residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::vector<double> gap_history;
  std::string message;
};

struct InitialPoint {
  BlockMatrix x;
  std::vector<double> y;
  BlockMatrix s;
};

// ---------------------------------------------------------------------------
// Constraint algebra

/// <A, X> for a constraint in entry form.
inline double apply(const SdpConstraint& a, const BlockMatrix& x) {
  double s = 0.0;
  for (const auto& e : a.dense) s += (e.i == e.j ? 1.0 : 2.0) * e.value * x.dense(e.i, e.j);
  for (const auto& e : a.diag) s += e.value * x.diag[e.i];
  return s;
}

/// <A, M> for a possibly nonsymmetric dense M (only the symmetric part counts).
inline double apply_general(const std::vector<DenseEntry>& entries, const Matrix& m) {
  double s = 0.0;
  for (const auto& e : entries)
    s += e.i == e.j ? e.value * m(e.i, e.i) : e.value * (m(e.i, e.j) + m(e.j, e.i));
  return s;
}

/// Accumulates scale * A into out.
inline void add_scaled(const SdpConstraint& a, double scale, BlockMatrix& out) {
  for (const auto& e : a.dense) out.dense.add(e.i, e.j, scale * e.value);
  for (const auto& e : a.diag) out.diag[e.i] += scale * e.value;
}

/// Entries normalized to i <= j with duplicates merged and zeros dropped.
inline std::vector<DenseEntry> normalize_entries(std::vector<DenseEntry> in) {
  std::map<std::pair<std::size_t, std::size_t>, double> acc;
  for (const auto& e : in) acc[{std::min(e.i, e.j), std::max(e.i, e.j)}] += e.value;
  std::vector<DenseEntry> out;
  for (const auto& [k, v] : acc)
    if (v != 0.0) out.push_back({k.first, k.second, v});
  return out;
}

inline std::vector<DiagEntry> normalize_entries(std::vector<DiagEntry> in) {
  std::map<std::size_t, double> acc;
  for (const auto& e : in) acc[e.i] += e.value;
  std::vector<DiagEntry> out;
  for (const auto& [k, v] : acc)
    if (v != 0.0) out.push_back({k, v});
  return out;
}

/// Checks index ranges, finiteness, a non-empty constraint list and linear
/// independence of the constraints (Gram matrix of the vectorized A_k has
/// smallest eigenvalue above 1e-10 times its largest). Throws
/// std::invalid_argument on violation.
inline void validate_problem(const SdpProblem& p) {
  if (p.constraints.empty()) throw std::invalid_argument("problem has no constraints");
  if (p.dense_dim == 0 && p.diag_dim == 0) throw std::invalid_argument("problem has empty cone");
  if (p.objective.dense.dim() != p.dense_dim || p.objective.diag.size() != p.diag_dim)
    throw std::invalid_argument("objective block dimensions do not match the problem");
  for (double v : p.objective.diag)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite objective entry");

  const std::size_t K = p.constraints.size();
  // Coordinate -> (constraint, weighted coefficient) lists for the Gram matrix.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, double>>> dense_coords;
  std::vector<std::vector<std::pair<std::size_t, double>>> diag_coords(p.diag_dim);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& c = p.constraints[k];
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("non-finite right-hand side");
    for (const auto& e : c.dense) {
      if (e.i >= p.dense_dim || e.j >= p.dense_dim)
        throw std::invalid_argument("dense entry out of range in constraint " + std::to_string(k));
      if (e.i > e.j) throw std::invalid_argument("dense entries must be normalized (i <= j)");
      if (!std::isfinite(e.value)) throw std::invalid_argument("non-finite constraint entry");
      dense_coords[{e.i, e.j}].emplace_back(k, e.value);
    }
    for (const auto& e : c.diag) {
      if (e.i >= p.diag_dim)
        throw std::invalid_argument("diagonal entry out of range in constraint " + std::to_string(k));
      if (!std::isfinite(e.value)) throw std::invalid_argument("non-finite constraint entry");
      diag_coords[e.i].emplace_back(k, e.value);
    }
  }

  SymMatrix gram(K);
  auto accumulate = [&](const std::vector<std::pair<std::size_t, double>>& list, double weight) {
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a; b < list.size(); ++b) {
        const double v = weight * list[a].second * list[b].second;
        if (list[a].first == list[b].first) {
          gram.add(list[a].first, list[a].first, v * (a == b ? 1.0 : 2.0));
        } else {
          gram.add(list[a].first, list[b].first, v);
        }
      }
  };
  for (const auto& [coord, list] : dense_coords) accumulate(list, coord.first == coord.second ? 1.0 : 2.0);
  for (const auto& list : diag_coords) accumulate(list, 1.0);

  // Largest eigenvalue by power iteration from a fixed start.
  std::vector<double> v(K, 1.0 / std::sqrt(static_cast<double>(K))), w(K);
  double lambda_max = 0.0;
  for (int it = 0; it < 100; ++it) {
    for (std::size_t r = 0; r < K; ++r) {
      double s = 0.0;
      const double* gr = gram.dense().row(r);
      for (std::size_t c = 0; c < K; ++c) s += gr[c] * v[c];
      w[r] = s;
    }
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    if (nw == 0.0) throw std::invalid_argument("constraint matrices are all zero");
    const double prev = lambda_max;
    lambda_max = nw;
    for (std::size_t r = 0; r < K; ++r) v[r] = w[r] / nw;
    if (it > 5 && std::abs(lambda_max - prev) <= 1e-6 * lambda_max) break;
  }
  Matrix shifted = gram.dense();
  const double shift = 1e-10 * lambda_max * 1.01;
  for (std::size_t r = 0; r < K; ++r) shifted(r, r) -= shift;
  if (detail::cholesky_in_place(shifted.data().data(), K, 0.0))
    throw std::invalid_argument("constraint matrices are numerically linearly dependent");
}

/// X0 = tau I with tau matching a trace-type equality when one exists (else 1),
/// S0 = (1 + ||C||) I, y0 = 0.
inline InitialPoint default_initialization(const SdpProblem& p) {
  double tau = 1.0;
  for (const auto& c : p.constraints) {
    if (!c.diag.empty() || p.dense_dim == 0 || c.dense.size() != p.dense_dim) continue;
    const double alpha = c.dense.front().value;
    bool trace_like = alpha != 0.0;
    std::vector<bool> hit(p.dense_dim, false);
    for (const auto& e : c.dense) {
      if (e.i != e.j || e.value != alpha || hit[e.i]) {
        trace_like = false;
        break;
      }
      hit[e.i] = true;
    }
    if (!trace_like) continue;
    const double t = c.rhs / (alpha * static_cast<double>(p.dense_dim));
    if (t > 0.0) {
      tau = t;
      break;
    }
  }
  const double sigma = 1.0 + norm(p.objective);
  return {BlockMatrix::identity(p.dense_dim, p.diag_dim, tau), std::vector<double>(p.constraints.size(), 0.0),
          BlockMatrix::identity(p.dense_dim, p.diag_dim, sigma)};
}

namespace detail {

/// L^{-1} B for lower-triangular L (row-major).
inline Matrix forward_solve(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows();
  Matrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      const double* xk = x.row(k);
      for (std::size_t c = 0; c < x.cols(); ++c) xi[c] -= lik * xk[c];
    }
    const double d = l(i, i);
    for (std::size_t c = 0; c < x.cols(); ++c) xi[c] /= d;
  }
  return x;
}

inline std::optional<Matrix> lower_factor(const Matrix& a) {
  Matrix l = a;
  if (cholesky_in_place(l.data().data(), l.rows())) return std::nullopt;
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = i + 1; j < l.cols(); ++j) l(i, j) = 0.0;
  return l;
}

inline Matrix spd_inverse(const Matrix& l) {
  // (L L^T)^{-1} = L^{-T} L^{-1}
  Matrix linv = forward_solve(l, Matrix::identity(l.rows()));
  Matrix inv = linv.transpose() * linv;
  return inv;
}

inline SymMatrix sym_part(const Matrix& m) { return SymMatrix(m); }

inline bool is_pd(const Matrix& m) {
  Matrix c = m;
  return !cholesky_in_place(c.data().data(), c.rows());
}

/// Largest alpha <= 1 with x + alpha dx strictly inside the cone, scaled by
/// gamma and confirmed by a Cholesky probe.
inline double step_length(const BlockMatrix& x, const Matrix& x_factor, const BlockMatrix& dx, double gamma,
                          bool probe = true) {
  double amax = std::numeric_limits<double>::infinity();
  const std::size_t n = x.dense.dim();
  if (n > 0) {
    Matrix y = forward_solve(x_factor, dx.dense.dense());
    Matrix w = forward_solve(x_factor, y.transpose());
    const double lmin = min_eigenvalue(SymMatrix(w));
    if (lmin < 0.0) amax = -1.0 / lmin;
  }
  for (std::size_t i = 0; i < x.diag.size(); ++i)
    if (dx.diag[i] < 0.0) amax = std::min(amax, -x.diag[i] / dx.diag[i]);
  double alpha = std::min(1.0, gamma * amax);
  if (n > 0 && probe) {
    for (int probe = 0; probe < 60; ++probe) {
      Matrix trial = x.dense.dense();
      auto t = trial.data();
      const auto d = dx.dense.dense().data();
      for (std::size_t k = 0; k < t.size(); ++k) t[k] += alpha * d[k];
      if (is_pd(trial)) break;
      alpha *= 0.8;
      if (probe == 59) alpha = 0.0;
    }
  }
  return alpha;
}

/// Per-constraint data for Schur complement assembly.
struct ExpandedConstraint {
  struct Term {
    std::size_t i, j;
    double a;
  };
  std::vector<Term> full;  // both orientations of off-diagonal entries
  bool dense = false;
};

}  // namespace detail

/// Primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector) for SdpProblem. Deterministic for identical input.
inline SdpSolution solve(const SdpProblem& problem, const SolverConfig& cfg = {},
                         std::optional<InitialPoint> start = std::nullopt) {
  cfg.validate();
  validate_problem(problem);

  const std::size_t m = problem.dense_dim;
  const std::size_t d2 = problem.diag_dim;
  const std::size_t K = problem.constraints.size();
  const double N = static_cast<double>(m + d2);
  const auto& C = problem.objective;
  const double c_norm = norm(C);

  InitialPoint init = start ? std::move(*start) : default_initialization(problem);
  BlockMatrix X = std::move(init.x), S = std::move(init.s);
  std::vector<double> y = std::move(init.y);

  std::vector<detail::ExpandedConstraint> ex(K);
  constexpr std::size_t kDenseThreshold = 8;
  for (std::size_t k = 0; k < K; ++k) {
    for (const auto& e : problem.constraints[k].dense) {
      ex[k].full.push_back({e.i, e.j, e.value});
      if (e.i != e.j) ex[k].full.push_back({e.j, e.i, e.value});
    }
    ex[k].dense = ex[k].full.size() > kDenseThreshold;
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> diag_users(d2);
  for (std::size_t k = 0; k < K; ++k)
    for (const auto& e : problem.constraints[k].diag) diag_users[e.i].emplace_back(k, e.value);

  SdpSolution best;
  double best_merit = std::numeric_limits<double>::infinity();
  std::vector<double> merit_history;
  std::vector<double> schur(K * K);
  std::vector<double> rp(K), rhs(K), dy(K);

  auto finish = [&](SdpSolution sol, SolveStatus status, std::string msg) {
    sol.status = status;
    sol.message = std::move(msg);
    return sol;
  };

  for (std::size_t iter = 0;; ++iter) {
    // Residuals and objectives at the current iterate.
    double pinf = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const auto& c = problem.constraints[k];
      rp[k] = c.rhs - apply(c, X);
      pinf = std::max(pinf, std::abs(rp[k]) / (1.0 + std::abs(c.rhs)));
    }
    BlockMatrix Rd = C;  // C - A^T y + S
    for (std::size_t k = 0; k < K; ++k)
      if (y[k] != 0.0) add_scaled(problem.constraints[k], -y[k], Rd);
    {
      auto r = Rd.dense;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) r.set(i, j, Rd.dense(i, j) + S.dense(i, j));
      Rd.dense = std::move(r);
      for (std::size_t i = 0; i < d2; ++i) Rd.diag[i] += S.diag[i];
    }
    const double dinf = norm(Rd) / (1.0 + c_norm);
    const double pobj = inner(C, X);
    double dobj = 0.0;
    for (std::size_t k = 0; k < K; ++k) dobj += problem.constraints[k].rhs * y[k];
    const double xs = inner(X, S);
    const double mu = xs / N;
    const double relgap = std::max(std::abs(pobj - dobj), xs) / (1.0 + std::abs(dobj));

    SdpSolution cur;
    cur.x = X;
    cur.y = y;
    cur.s = S;
    cur.primal_objective = pobj;
    cur.dual_objective = dobj;
    cur.relative_gap = relgap;
    cur.primal_residual = pinf;
    cur.dual_residual = dinf;
    cur.iterations = iter;
    best.gap_history.push_back(relgap);
    cur.gap_history = best.gap_history;

    const double merit = std::max({relgap / cfg.gap_tol, pinf / cfg.feas_tol, dinf / cfg.feas_tol});
    merit_history.push_back(merit);
    if (merit <= best_merit || best_merit == std::numeric_limits<double>::infinity()) {
      best_merit = merit;
      best = cur;
    } else {
      best.gap_history = cur.gap_history;
    }

    if (relgap <= cfg.gap_tol && pinf <= cfg.feas_tol && dinf <= cfg.feas_tol)
      return finish(std::move(cur), SolveStatus::Optimal, "converged");
    if (iter >= cfg.max_iterations) return finish(std::move(best), SolveStatus::MaxIterations, "iteration limit");
    if (iter >= 15 && merit > 0.99 * merit_history[iter - 15])
      return finish(std::move(best), SolveStatus::MaxIterations, "stalled");
    if (!std::isfinite(merit)) return finish(std::move(best), SolveStatus::NumericalFailure, "non-finite iterate");

    // Scaling matrices.
    auto lx = detail::lower_factor(X.dense.dense());
    auto ls = detail::lower_factor(S.dense.dense());
    if (m > 0 && (!lx || !ls))
      return finish(std::move(best), SolveStatus::NumericalFailure, "iterate left the cone");
    const Matrix Z = m > 0 ? detail::spd_inverse(*ls) : Matrix();
    std::vector<double> zd(d2);
    for (std::size_t i = 0; i < d2; ++i) zd[i] = 1.0 / S.diag[i];
    const Matrix& Xd = X.dense.dense();

    // Schur complement M_kl = <A_k, X A_l Z> (+ diagonal block terms).
    std::fill(schur.begin(), schur.end(), 0.0);
    std::vector<Matrix> g(K);
    for (std::size_t l = 0; l < K; ++l) {
      if (!ex[l].dense) continue;
      Matrix xa(m, m);
      for (const auto& t : ex[l].full)
        for (std::size_t r = 0; r < m; ++r) xa(r, t.j) += Xd(r, t.i) * t.a;
      g[l] = xa * Z;
    }
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t l = k; l < K; ++l) {
        double v = 0.0;
        if (ex[l].dense || ex[k].dense) {
          const std::size_t d = ex[l].dense ? l : k;
          const std::size_t o = ex[l].dense ? k : l;
          for (const auto& t : ex[o].full) v += t.a * g[d](t.j, t.i);
        } else {
          for (const auto& t : ex[k].full)
            for (const auto& u : ex[l].full) v += t.a * u.a * Xd(t.j, u.i) * Z(u.j, t.i);
        }
        schur[k * K + l] = v;
        schur[l * K + k] = v;
      }
    }
    for (std::size_t i = 0; i < d2; ++i) {
      const double w = X.diag[i] * zd[i];
      for (const auto& [k, a] : diag_users[i])
        for (const auto& [l, c] : diag_users[i]) schur[k * K + l] += a * c * w;
    }
    double schur_scale = 0.0;
    for (std::size_t k = 0; k < K; ++k) schur_scale = std::max(schur_scale, std::abs(schur[k * K + k]));
    std::vector<double> factor = schur;
    bool factored = !detail::cholesky_in_place(factor.data(), K);
    for (double reg : {1e-14, 1e-12, 1e-10}) {
      if (factored) break;
      factor = schur;
      for (std::size_t k = 0; k < K; ++k) factor[k * K + k] += reg * schur_scale;
      factored = !detail::cholesky_in_place(factor.data(), K);
    }
    if (!factored)
      return finish(std::move(best), SolveStatus::NumericalFailure, "Schur complement lost definiteness");

    // X Rd Z is shared by both directions.
    const Matrix xrz = m > 0 ? (Xd * Rd.dense.dense()) * Z : Matrix();

    // Direction for target sigma*mu with optional second-order correction.
    auto direction = [&](double target, const Matrix* corr_dense, const std::vector<double>* corr_diag,
                         BlockMatrix& dX, BlockMatrix& dS) {
      Matrix t(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double v = target * Z(i, j) - Xd(i, j) + xrz(i, j);
          if (corr_dense) v -= (*corr_dense)(i, j);
          t(i, j) = v;
        }
      std::vector<double> td(d2);
      for (std::size_t i = 0; i < d2; ++i) {
        td[i] = target * zd[i] - X.diag[i] + X.diag[i] * Rd.diag[i] * zd[i];
        if (corr_diag) td[i] -= (*corr_diag)[i];
      }
      for (std::size_t k = 0; k < K; ++k) {
        double v = apply_general(problem.constraints[k].dense, t);
        for (const auto& e : problem.constraints[k].diag) v += e.value * td[e.i];
        rhs[k] = v - rp[k];
      }
      dy = rhs;
      detail::cholesky_solve_in_place(factor.data(), K, dy.data());

      dS = BlockMatrix(m, d2);
      for (std::size_t k = 0; k < K; ++k)
        if (dy[k] != 0.0) add_scaled(problem.constraints[k], dy[k], dS);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) dS.dense.set(i, j, dS.dense(i, j) - Rd.dense(i, j));
      for (std::size_t i = 0; i < d2; ++i) dS.diag[i] -= Rd.diag[i];

      Matrix base(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double v = target * Z(i, j) - Xd(i, j);
          if (corr_dense) v -= (*corr_dense)(i, j);
          base(i, j) = v;
        }
      const Matrix xdsz = m > 0 ? (Xd * dS.dense.dense()) * Z : Matrix();
      Matrix dxm(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) dxm(i, j) = base(i, j) - xdsz(i, j);
      dX = BlockMatrix(m, d2);
      dX.dense = detail::sym_part(dxm);
      for (std::size_t i = 0; i < d2; ++i) {
        double v = target * zd[i] - X.diag[i] - X.diag[i] * dS.diag[i] * zd[i];
        if (corr_diag) v -= (*corr_diag)[i];
        dX.diag[i] = v;
      }
    };

    const double gamma = cfg.step_fraction;
    BlockMatrix dX, dS;
    double ap = 0.0, ad = 0.0;
    if (cfg.predictor_corrector) {
      direction(0.0, nullptr, nullptr, dX, dS);
      ap = detail::step_length(X, m > 0 ? *lx : Matrix(), dX, 1.0, false);
      ad = detail::step_length(S, m > 0 ? *ls : Matrix(), dS, 1.0, false);
      BlockMatrix xa = X, sa = S;
      {
        auto xd = xa.dense.dense();
        auto sdm = sa.dense.dense();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            xd(i, j) += ap * dX.dense(i, j);
            sdm(i, j) += ad * dS.dense(i, j);
          }
        xa.dense = SymMatrix(xd);
        sa.dense = SymMatrix(sdm);
        for (std::size_t i = 0; i < d2; ++i) {
          xa.diag[i] += ap * dX.diag[i];
          sa.diag[i] += ad * dS.diag[i];
        }
      }
      const double mu_aff = inner(xa, sa) / N;
      double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
      const Matrix corr = m > 0 ? (dX.dense.dense() * dS.dense.dense()) * Z : Matrix();
      std::vector<double> corr_d(d2);
      for (std::size_t i = 0; i < d2; ++i) corr_d[i] = dX.diag[i] * dS.diag[i] * zd[i];
      direction(sigma * mu, &corr, &corr_d, dX, dS);
    } else {
      direction(0.1 * mu, nullptr, nullptr, dX, dS);
    }
    ap = detail::step_length(X, m > 0 ? *lx : Matrix(), dX, gamma);
    ad = detail::step_length(S, m > 0 ? *ls : Matrix(), dS, gamma);
    if (ap == 0.0 && ad == 0.0)
      return finish(std::move(best), SolveStatus::NumericalFailure, "zero step length");

    {
      Matrix xd = X.dense.dense(), sdm = S.dense.dense();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          xd(i, j) += ap * dX.dense(i, j);
          sdm(i, j) += ad * dS.dense(i, j);
        }
      X.dense = SymMatrix(xd);
      S.dense = SymMatrix(sdm);
    }
    for (std::size_t i = 0; i < d2; ++i) {
      X.diag[i] += ap * dX.diag[i];
      S.diag[i] += ad * dS.diag[i];
    }
    for (std::size_t k = 0; k < K; ++k) y[k] += ad * dy[k];
  }
}

}  // namespace isosdp
