#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "skewgof/errors.hpp"

namespace skewgof {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Dense row-major matrix. Small p throughout (p <= ~10), so no blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows_(r), cols_(c), a_(r * c, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diag(const Vec& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const double* row_ptr(std::size_t i) const { return a_.data() + i * cols_; }
  double* row_ptr(std::size_t i) { return a_.data() + i * cols_; }

  bool finite() const {
    for (double v : a_)
      if (!std::isfinite(v)) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline Vec matvec(const Matrix& m, const Vec& v) {
  Vec y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row_ptr(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * v[j];
    y[i] = s;
  }
  return y;
}

// y = M^T v
inline Vec matvec_t(const Matrix& m, const Vec& v) {
  Vec y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row_ptr(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += r[j] * v[i];
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline void check_square_symmetric(const Matrix& a, const char* who) {
  if (!a.square()) throw std::invalid_argument(std::string(who) + ": matrix not square");
  if (!a.finite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
  double scale = std::max(1.0, a.max_abs());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-8 * scale)
        throw std::invalid_argument(std::string(who) + ": matrix not symmetric");
}

struct SymEigen {
  Matrix vectors;  // columns are eigenvectors
  Vec values;      // ascending
};

// Symmetric eigendecomposition: Householder tridiagonalization followed by
// implicit-shift QL, eigenvalues sorted ascending, each eigenvector's first
// entry of non-negligible magnitude made positive so the factorization is
// deterministic across platforms.
inline SymEigen sym_eigen(const Matrix& a_in) {
  check_square_symmetric(a_in, "sym_eigen");
  const std::size_t n = a_in.rows();
  SymEigen out;
  out.values.assign(n, 0.0);
  if (n == 0) {
    out.vectors = Matrix(0, 0);
    return out;
  }
  // work on the symmetrized copy so tiny asymmetries cannot bias the result
  Matrix z(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) z(i, j) = 0.5 * (a_in(i, j) + a_in(j, i));
  Vec d(n, 0.0), e(n, 0.0);

  // Householder reduction to tridiagonal form, accumulating the transform in z.
  for (std::size_t ii = n - 1; ii >= 1; --ii) {
    const std::size_t i = ii;
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) z(j, i) = z(i, j) = 0.0;
  }

  // Implicit-shift QL on the tridiagonal (d, e); sweep budget 30*n overall.
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  long sweeps_left = 30 * static_cast<long>(n);
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-300 || std::fabs(e[m]) <= 2.22e-16 * dd) break;
      }
      if (m == l) break;
      if (--sweeps_left < 0) throw numeric_error("sym_eigen: QL sweep budget exhausted");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i1 = m; i1-- > l;) {
        const std::size_t i = i1;
        double f = s * e[i];
        double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < n; ++k) {
          f = z(k, i + 1);
          z(k, i + 1) = s * z(k, i) + c * f;
          z(k, i) = c * z(k, i) - s * f;
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }

  // sort ascending, carry eigenvector columns along
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[idx[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = z(i, idx[j]);
  }
  // sign convention: first entry of appreciable size is positive
  for (std::size_t j = 0; j < n; ++j) {
    double colmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) colmax = std::max(colmax, std::fabs(out.vectors(i, j)));
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(out.vectors(i, j)) > 1e-12 * colmax) {
        if (out.vectors(i, j) < 0.0)
          for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = -out.vectors(k, j);
        break;
      }
    }
  }
  return out;
}

namespace detail {
inline Matrix spd_power(const Matrix& a, double expo, const char* who) {
  SymEigen eg = sym_eigen(a);
  const std::size_t n = a.rows();
  double lmax = n ? std::max(eg.values.back(), 0.0) : 0.0;
  for (double lv : eg.values)
    if (!(lv > 1e-14 * std::max(1.0, lmax)))
      throw numeric_error(std::string(who) + ": matrix not positive definite");
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eg.vectors(i, k) * std::pow(eg.values[k], expo) * eg.vectors(j, k);
      b(i, j) = b(j, i) = s;
    }
  return b;
}
}  // namespace detail

inline Matrix spd_sqrt(const Matrix& a) { return detail::spd_power(a, 0.5, "spd_sqrt"); }
inline Matrix spd_sqrt_inv(const Matrix& a) { return detail::spd_power(a, -0.5, "spd_sqrt_inv"); }

// Symmetric square root of a PSD matrix where eigenvalues may legitimately
// reach zero (boundary conditional covariances); roundoff negatives are
// clipped, genuinely negative spectra still throw.
inline Matrix psd_sqrt(const Matrix& a) {
  SymEigen eg = sym_eigen(a);
  const std::size_t n = a.rows();
  double lmax = n ? std::max(eg.values.back(), 0.0) : 0.0;
  for (double lv : eg.values)
    if (lv < -1e-10 * std::max(1.0, lmax)) throw numeric_error("psd_sqrt: matrix not PSD");
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += eg.vectors(i, k) * std::sqrt(std::max(eg.values[k], 0.0)) * eg.vectors(j, k);
      b(i, j) = b(j, i) = s;
    }
  return b;
}

// Lower-triangular Cholesky factor of an SPD matrix: A = L L^T.
inline Matrix cholesky(const Matrix& a) {
  check_square_symmetric(a, "cholesky");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw numeric_error("cholesky: matrix not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

inline Vec solve_lower(const Matrix& l, const Vec& b) {
  const std::size_t n = l.rows();
  Vec x(b);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

// solves L^T x = b for lower-triangular L
inline Vec solve_lower_transpose(const Matrix& l, const Vec& b) {
  const std::size_t n = l.rows();
  Vec x(b);
  for (std::size_t i1 = n; i1-- > 0;) {
    double s = x[i1];
    for (std::size_t k = i1 + 1; k < n; ++k) s -= l(k, i1) * x[k];
    x[i1] = s / l(i1, i1);
  }
  return x;
}

// solves A x = b given the Cholesky factor L of A
inline Vec solve_chol(const Matrix& l, const Vec& b) {
  return solve_lower_transpose(l, solve_lower(l, b));
}

inline double logdet_from_chol(const Matrix& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

inline Matrix inverse_spd(const Matrix& a) {
  Matrix l = cholesky(a);
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  Vec ei(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    ei.assign(n, 0.0);
    ei[j] = 1.0;
    Vec col = solve_chol(l, ei);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  // symmetrize against round-off
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      inv(i, j) = inv(j, i) = 0.5 * (inv(i, j) + inv(j, i));
  return inv;
}

// Partial-pivot LU for general square matrices (used where a mixing matrix is
// merely invertible, not SPD).
struct LuFactor {
  Matrix lu;
  std::vector<std::size_t> piv;
  double parity = 1.0;
};

inline LuFactor lu_decompose(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("lu_decompose: matrix not square");
  if (!a.finite()) throw std::invalid_argument("lu_decompose: non-finite entries");
  const std::size_t n = a.rows();
  LuFactor f{a, std::vector<std::size_t>(n), 1.0};
  for (std::size_t i = 0; i < n; ++i) f.piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pk = k;
    double best = std::fabs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(f.lu(i, k)) > best) {
        best = std::fabs(f.lu(i, k));
        pk = i;
      }
    if (!(best > 0.0)) throw numeric_error("lu_decompose: matrix is singular");
    if (pk != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(pk, j));
      std::swap(f.piv[k], f.piv[pk]);
      f.parity = -f.parity;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      f.lu(i, k) /= f.lu(k, k);
      double lik = f.lu(i, k);
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= lik * f.lu(k, j);
    }
  }
  return f;
}

inline Vec lu_solve(const LuFactor& f, const Vec& b) {
  const std::size_t n = f.lu.rows();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.piv[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= f.lu(i, k) * x[k];
    x[i] = s;
  }
  for (std::size_t i1 = n; i1-- > 0;) {
    double s = x[i1];
    for (std::size_t k = i1 + 1; k < n; ++k) s -= f.lu(i1, k) * x[k];
    x[i1] = s / f.lu(i1, i1);
  }
  return x;
}

inline double lu_log_abs_det(const LuFactor& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.lu.rows(); ++i) s += std::log(std::fabs(f.lu(i, i)));
  return s;
}

// Orthonormal matrix whose first column is v/||v||.  The remaining columns
// complete the basis by Gram-Schmidt over the canonical vectors e_j taken in
// ascending index order, skipping the index where |v| is largest (that e_k is
// the one v can stand in for, and skipping it keeps the set independent).
// Deterministic and scale-invariant in v.
inline Matrix orthonormal_basis_from(const Vec& v) {
  const std::size_t p = v.size();
  if (p == 0) throw std::invalid_argument("orthonormal_basis_from: empty vector");
  if (!all_finite(v)) throw std::invalid_argument("orthonormal_basis_from: non-finite entries");
  double nv = norm2(v);
  if (!(nv > 0.0)) throw std::invalid_argument("orthonormal_basis_from: zero vector");
  std::size_t k = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < p; ++i) {
    if (std::fabs(v[i]) > best) {
      best = std::fabs(v[i]);
      k = i;
    }
  }
  Matrix q(p, p);
  for (std::size_t i = 0; i < p; ++i) q(i, 0) = v[i] / nv;
  std::size_t col = 1;
  for (std::size_t j = 0; j < p && col < p; ++j) {
    if (j == k) continue;
    Vec u(p, 0.0);
    u[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {  // Gram-Schmidt, one reorthogonalization pass
      for (std::size_t c = 0; c < col; ++c) {
        double proj = 0.0;
        for (std::size_t i = 0; i < p; ++i) proj += u[i] * q(i, c);
        for (std::size_t i = 0; i < p; ++i) u[i] -= proj * q(i, c);
      }
    }
    double nu = norm2(u);
    if (!(nu > 1e-12)) throw numeric_error("orthonormal_basis_from: degenerate completion");
    for (std::size_t i = 0; i < p; ++i) q(i, col) = u[i] / nu;
    ++col;
  }
  return q;
}

}  // namespace skewgof
