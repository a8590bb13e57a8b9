#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace isosdp {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double* row(std::size_t i) noexcept { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const noexcept { return data_.data() + i * cols_; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Square symmetric matrix. Construction from a general matrix symmetrizes it
/// as (A + A^T)/2; non-finite entries are rejected.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : m_(dim, dim) {}

  explicit SymMatrix(const Matrix& a) : m_(a.rows(), a.cols()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("symmetric matrix must be square");
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = 0.5 * (a(i, j) + a(j, i));
        if (!std::isfinite(v)) throw std::domain_error("non-finite matrix entry");
        m_(i, j) = m_(j, i) = v;
      }
    }
  }

  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  static SymMatrix diagonal(std::span<const double> d) {
    SymMatrix s(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
    return s;
  }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) noexcept { m_(i, j) = m_(j, i) = v; }
  void add(std::size_t i, std::size_t j, double v) noexcept {
    m_(i, j) += v;
    if (i != j) m_(j, i) += v;
  }
  const Matrix& dense() const noexcept { return m_; }
  double trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
    return t;
  }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

/// <A, B> = trace(A^T B).
inline double inner(const SymMatrix& a, const SymMatrix& b) {
  const auto x = a.dense().data();
  const auto y = b.dense().data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : std::runtime_error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class EigenError : public std::runtime_error {
 public:
  EigenError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

namespace detail {

using simd8 = double __attribute__((vector_size(64)));

// Trailing update C(i, j) -= sum_k P(i, k) P(j, k) for j <= i over an
// nr x nr lower triangle with leading dimension ld. pt holds P transposed.
inline void syrk_lower_update(double* c, std::size_t ld, std::size_t nr, std::size_t kb,
                              const double* p, const double* pt) {
  constexpr std::size_t RI = 6, CJ = 16;
  for (std::size_t i0 = 0; i0 < nr; i0 += RI) {
    const std::size_t ri = std::min(RI, nr - i0);
    const std::size_t jend = i0 + ri;
    for (std::size_t j0 = 0; j0 < jend; j0 += CJ) {
      const std::size_t cj = std::min(CJ, jend - j0);
      if (ri == RI && cj == CJ) {
        simd8 acc[RI][2] = {};
        for (std::size_t k = 0; k < kb; ++k) {
          simd8 b0, b1;
          std::memcpy(&b0, pt + k * nr + j0, sizeof b0);
          std::memcpy(&b1, pt + k * nr + j0 + 8, sizeof b1);
          for (std::size_t r = 0; r < RI; ++r) {
            const double a = p[(i0 + r) * kb + k];
            acc[r][0] += a * b0;
            acc[r][1] += a * b1;
          }
        }
        for (std::size_t r = 0; r < RI; ++r) {
          double* cr = c + (i0 + r) * ld + j0;
          const std::size_t lim = std::min(CJ, i0 + r + 1 - j0);
          for (std::size_t q = 0; q < lim; ++q) cr[q] -= acc[r][q / 8][q % 8];
        }
      } else {
        for (std::size_t r = 0; r < ri; ++r) {
          const std::size_t i = i0 + r;
          for (std::size_t q = 0; q < cj && j0 + q <= i; ++q) {
            const std::size_t j = j0 + q;
            double s = 0.0;
            for (std::size_t k = 0; k < kb; ++k) s += p[i * kb + k] * p[j * kb + k];
            c[i * ld + j] -= s;
          }
        }
      }
    }
  }
}

/// Blocked right-looking Cholesky of the lower triangle of a row-major n x n
/// array. On success the lower triangle holds L; returns the failing pivot
/// index otherwise. A pivot is rejected when it is not finite or does not
/// exceed min_pivot.
inline std::optional<std::size_t> cholesky_in_place(double* a, std::size_t n, double min_pivot = 0.0) {
  constexpr std::size_t B = 96;
  std::vector<double> p, pt;
  for (std::size_t k0 = 0; k0 < n; k0 += B) {
    const std::size_t kb = std::min(B, n - k0);
    for (std::size_t j = k0; j < k0 + kb; ++j) {
      double* aj = a + j * n;
      double d = aj[j];
      for (std::size_t k = k0; k < j; ++k) d -= aj[k] * aj[k];
      if (!(d > min_pivot) || !std::isfinite(d)) return j;
      d = std::sqrt(d);
      aj[j] = d;
      for (std::size_t i = j + 1; i < k0 + kb; ++i) {
        double* ai = a + i * n;
        double s = ai[j];
        for (std::size_t k = k0; k < j; ++k) s -= ai[k] * aj[k];
        ai[j] = s / d;
      }
    }
    const std::size_t r0 = k0 + kb;
    if (r0 >= n) break;
    const std::size_t nr = n - r0;
    for (std::size_t i = r0; i < n; ++i) {
      double* ai = a + i * n;
      for (std::size_t j = k0; j < k0 + kb; ++j) {
        const double* lj = a + j * n;
        double s = ai[j];
        for (std::size_t k = k0; k < j; ++k) s -= ai[k] * lj[k];
        ai[j] = s / lj[j];
      }
    }
    p.assign(nr * kb, 0.0);
    pt.assign(kb * nr, 0.0);
    for (std::size_t i = 0; i < nr; ++i) {
      const double* src = a + (r0 + i) * n + k0;
      for (std::size_t k = 0; k < kb; ++k) {
        p[i * kb + k] = src[k];
        pt[k * nr + i] = src[k];
      }
    }
    syrk_lower_update(a + r0 * n + r0, n, nr, kb, p.data(), pt.data());
  }
  return std::nullopt;
}

/// Solves L L^T x = b in place given the lower factor (row-major, ld n).
inline void cholesky_solve_in_place(const double* l, std::size_t n, double* b) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = l + i * n;
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
    b[i] = s / li[i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
    b[i] = s / l[i * n + i];
  }
}

// Householder tridiagonalization followed by implicit-shift QL, after the
// EISPACK tred2/tql2 pair. v is row-major n x n; on return d holds the
// eigenvalues and, when vectors are wanted, the columns of v the eigenvectors.
inline void tridiagonal_ql(std::vector<double>& v, std::size_t n, std::vector<double>& d, bool vectors) {
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };
  std::vector<double> e(n, 0.0);
  d.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (std::size_t k = j + 1; k + 1 <= i; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k + 1 <= i; ++k) V(k, j) -= (f * e[k] + g * d[k]);
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  if (vectors) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      V(n - 1, i) = V(i, i);
      V(i, i) = 1.0;
      const double h = d[i + 1];
      if (h != 0.0) {
        for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
        for (std::size_t j = 0; j <= i; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
          for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
        }
      }
      for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = V(n - 1, j);
      V(n - 1, j) = 0.0;
    }
    V(n - 1, n - 1) = 1.0;
  } else {
    for (std::size_t j = 0; j < n; ++j) d[j] = V(j, j);
  }
  e[0] = 0.0;

  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0, tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  const std::size_t max_iter = 30 * n + 30;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      std::size_t iter = 0;
      do {
        if (++iter > max_iter) throw EigenError("symmetric eigensolver did not converge", std::abs(e[l]));
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0, s = 0.0, s2 = 0.0;
        const double el1 = e[l + 1];
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (vectors) {
            for (std::size_t k = 0; k < n; ++k) {
              h = V(k, i + 1);
              V(k, i + 1) = s * V(k, i) + c * h;
              V(k, i) = c * V(k, i) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace detail

/// Lower Cholesky factor, or the index of the first pivot that failed.
struct CholeskyResult {
  std::optional<std::size_t> not_pd_pivot;
  Matrix lower;

  bool ok() const noexcept { return !not_pd_pivot.has_value(); }
};

/// Pivots not exceeding shift_tol * max|diag| count as not positive definite.
inline CholeskyResult cholesky(const SymMatrix& a, double shift_tol = 0.0) {
  const std::size_t n = a.dim();
  CholeskyResult res;
  res.lower = a.dense();
  double maxdiag = 0.0;
  for (std::size_t i = 0; i < n; ++i) maxdiag = std::max(maxdiag, std::abs(a(i, i)));
  res.not_pd_pivot = detail::cholesky_in_place(res.lower.data().data(), n, shift_tol * maxdiag);
  if (res.ok()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) res.lower(i, j) = 0.0;
  }
  return res;
}

/// Eigenvalues ascending; column i of vectors pairs with values[i].
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;
};

inline SymEigen sym_eigen(const SymMatrix& a) {
  const std::size_t n = a.dim();
  SymEigen out;
  if (n == 0) return out;
  std::vector<double> v(a.dense().data().begin(), a.dense().data().end());
  std::vector<double> d;
  detail::tridiagonal_ql(v, n, d, true);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = d[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v[r * n + order[c]];
  }
  return out;
}

inline std::vector<double> sym_eigenvalues(const SymMatrix& a) {
  const std::size_t n = a.dim();
  if (n == 0) return {};
  std::vector<double> v(a.dense().data().begin(), a.dense().data().end());
  std::vector<double> d;
  detail::tridiagonal_ql(v, n, d, false);
  std::sort(d.begin(), d.end());
  return d;
}

inline double min_eigenvalue(const SymMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return sym_eigenvalues(a).front();
}

/// Solves a x = b for positive definite a; throws NotPositiveDefinite.
inline std::vector<double> solve_spd(const SymMatrix& a, std::span<const double> b) {
  if (b.size() != a.dim()) throw std::invalid_argument("right-hand side length mismatch");
  auto chol = cholesky(a);
  if (!chol.ok()) throw NotPositiveDefinite(*chol.not_pd_pivot);
  std::vector<double> x(b.begin(), b.end());
  detail::cholesky_solve_in_place(chol.lower.data().data(), a.dim(), x.data());
  return x;
}

inline Matrix solve_spd(const SymMatrix& a, const Matrix& b) {
  if (b.rows() != a.dim()) throw std::invalid_argument("right-hand side row count mismatch");
  auto chol = cholesky(a);
  if (!chol.ok()) throw NotPositiveDefinite(*chol.not_pd_pivot);
  Matrix x(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
    detail::cholesky_solve_in_place(chol.lower.data().data(), a.dim(), col.data());
    for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = col[r];
  }
  return x;
}

}  // namespace isosdp
