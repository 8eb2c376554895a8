#pragma once

#include <cmath>
#include <limits>

#include "skewgof/skew_normal.hpp"

namespace skewgof {

// Multivariate skew-t: scale mixture sqrt(eta) X of a centered skew-normal X
// with eta ~ InverseGamma(nu/2, nu/2).  nu beyond 1e6 is treated as the
// skew-normal limit.
struct StParams {
  Vec xi;
  Matrix omega;
  Vec alpha;
  double nu = 1.0;

  std::size_t p() const { return xi.size(); }

  SnParams sn_part() const { return {xi, omega, alpha}; }

  void validate() const {
    sn_part().validate();
    if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("StParams: nu must be > 0");
  }
};

inline constexpr double st_nu_normal_limit = 1e6;

// Per row the draw order is eta, then the embedded skew-normal row
// (Z0 followed by p normals); the eta draw is skipped in the limit regime.
inline Sample sample_st(const StParams& par, std::size_t n, RandomStream& stream) {
  par.validate();
  const std::size_t p = par.p();
  bool limit = par.nu > st_nu_normal_limit;

  // same precomputation as sample_sn, but drawing row by row with the mixer
  Vec w = sn_scales(par.omega);
  Matrix ob = sn_correlation(par.omega, w);
  Vec oa = matvec(ob, par.alpha);
  double a2 = dot(par.alpha, oa);
  double s = std::sqrt(1.0 + a2);
  Vec d(p);
  for (std::size_t j = 0; j < p; ++j) d[j] = oa[j] / s;
  Matrix c(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) c(i, j) = ob(i, j) - d[i] * d[j];
  Matrix lc = psd_sqrt(c);  // boundary slants degenerate this conditional law

  Sample out(n, p);
  Vec z(p), v(p);
  for (std::size_t i = 0; i < n; ++i) {
    double root_eta = limit ? 1.0 : std::sqrt(stream.inverse_gamma(0.5 * par.nu, 0.5 * par.nu));
    double z0 = std::fabs(stream.normal());
    stream.normals(z.data(), p);
    for (std::size_t a = 0; a < p; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < p; ++b) acc += lc(a, b) * z[b];
      v[a] = acc;
    }
    for (std::size_t j = 0; j < p; ++j)
      out(i, j) = par.xi[j] + root_eta * w[j] * (d[j] * z0 + v[j]);
  }
  return out;
}

// 2 t_p(x; xi, Omega, nu) T_{nu+p}( alpha' omega^{-1} (x-xi) sqrt((nu+p)/(nu+Q)) )
inline double st_logpdf(const StParams& par, const Vec& x) {
  if (x.size() != par.p()) throw std::invalid_argument("st_logpdf: dimension mismatch");
  if (!all_finite(x)) throw std::invalid_argument("st_logpdf: non-finite point");
  if (par.nu > st_nu_normal_limit) return sn_logpdf(par.sn_part(), x);
  const std::size_t p = par.p();
  const double nu = par.nu;
  Matrix l = cholesky(par.omega);
  Vec u(p);
  for (std::size_t j = 0; j < p; ++j) u[j] = x[j] - par.xi[j];
  Vec y = solve_lower(l, u);
  double quad = dot(y, y);
  double s = 0.0;
  for (std::size_t j = 0; j < p; ++j) s += par.alpha[j] * u[j] / std::sqrt(par.omega(j, j));
  double core = std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) -
                0.5 * p * std::log(nu * pi_const) - 0.5 * logdet_from_chol(l) -
                0.5 * (nu + p) * std::log1p(quad / nu);
  double tail = student_t_cdf(s * std::sqrt((nu + p) / (nu + quad)), nu + p);
  if (!(tail > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(2.0) + core + std::log(tail);
}

inline double st_loglik(const StParams& par, const Sample& x) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) ll += st_logpdf(par, x.row_vec(i));
  return ll;
}

// The scale mixture leaves the skewness direction untouched, so the canonical
// transform is the one of the embedded skew-normal; nu rides along unchanged.
inline CanonicalInfo canonical_st(const StParams& par) { return canonical_sn(par.sn_part()); }

}  // namespace skewgof
