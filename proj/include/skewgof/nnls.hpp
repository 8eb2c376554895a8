#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "skewgof/matrix.hpp"

namespace skewgof {

// Non-negative least squares, Lawson-Hanson active set method:
// minimize ||A x - b||_2 subject to x >= 0.
inline Vec nnls(const Matrix& a, const Vec& b, int max_outer = 0) {
  const std::size_t m = a.rows(), n = a.cols();
  if (b.size() != m) throw std::invalid_argument("nnls: shape mismatch");
  if (max_outer <= 0) max_outer = 10 * static_cast<int>(n) + 30;

  std::vector<bool> passive(n, false);
  Vec x(n, 0.0);

  auto residual = [&]() {
    Vec r(m);
    for (std::size_t i = 0; i < m; ++i) {
      double s = b[i];
      const double* row = a.row_ptr(i);
      for (std::size_t j = 0; j < n; ++j) s -= row[j] * x[j];
      r[i] = s;
    }
    return r;
  };

  // least squares on the passive set via normal equations (sets are tiny here)
  auto solve_passive = [&](std::vector<double>& z) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    z.assign(n, 0.0);
    if (idx.empty()) return;
    const std::size_t k = idx.size();
    Matrix ata(k, k);
    Vec atb(k, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double* row = a.row_ptr(r);
      for (std::size_t i = 0; i < k; ++i) {
        atb[i] += row[idx[i]] * b[r];
        for (std::size_t j = i; j < k; ++j) ata(i, j) += row[idx[i]] * row[idx[j]];
      }
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) ata(j, i) = ata(i, j);
    // small ridge guards near-duplicate columns
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += ata(i, i);
    for (std::size_t i = 0; i < k; ++i) ata(i, i) += 1e-12 * (trace / k + 1.0);
    Vec sol = solve_chol(cholesky(ata), atb);
    for (std::size_t i = 0; i < k; ++i) z[idx[i]] = sol[i];
  };

  double wtol = 0.0;
  {
    Vec atb = matvec_t(a, b);
    for (double v : atb) wtol = std::max(wtol, std::fabs(v));
    wtol = 1e-10 * std::max(wtol, 1.0);
  }

  for (int outer = 0; outer < max_outer; ++outer) {
    Vec r = residual();
    Vec w = matvec_t(a, r);
    std::size_t best = n;
    double bestw = wtol;
    for (std::size_t j = 0; j < n; ++j)
      if (!passive[j] && w[j] > bestw) {
        bestw = w[j];
        best = j;
      }
    if (best == n) break;  // KKT satisfied
    passive[best] = true;

    Vec z;
    solve_passive(z);
    int inner_guard = 10 * static_cast<int>(n) + 30;
    while (inner_guard-- > 0) {
      bool all_pos = true;
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) all_pos = false;
      if (all_pos) break;
      double step = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0 && x[j] > z[j])
          step = std::min(step, x[j] / (x[j] - z[j]));
      if (!std::isfinite(step)) step = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j]) x[j] += step * (z[j] - x[j]);
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j] && x[j] <= 1e-14) {
          passive[j] = false;
          x[j] = 0.0;
        }
      solve_passive(z);
    }
    for (std::size_t j = 0; j < n; ++j) x[j] = passive[j] ? std::max(z[j], 0.0) : 0.0;
  }
  return x;
}

}  // namespace skewgof
