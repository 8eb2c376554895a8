#pragma once

#include <cmath>
#include <complex>

#include "skewgof/matrix.hpp"
#include "skewgof/rng.hpp"
#include "skewgof/sample.hpp"
#include "skewgof/special.hpp"

namespace skewgof {

// Multivariate skew-normal with location xi, SPD scale Omega and slant alpha:
// density 2 phi_p(x; xi, Omega) Phi(alpha' omega^{-1} (x - xi)), where omega
// is the diagonal of Omega's coordinate scales.
struct SnParams {
  Vec xi;
  Matrix omega;
  Vec alpha;

  std::size_t p() const { return xi.size(); }

  void validate() const {
    if (xi.empty() || omega.rows() != p() || omega.cols() != p() || alpha.size() != p())
      throw std::invalid_argument("SnParams: inconsistent dimensions");
    if (!all_finite(xi) || !all_finite(alpha) || !omega.finite())
      throw std::invalid_argument("SnParams: non-finite entries");
    check_square_symmetric(omega, "SnParams");
  }
};

// coordinate scales omega_j = sqrt(Omega_jj)
inline Vec sn_scales(const Matrix& omega) {
  Vec w(omega.rows());
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(omega(j, j) > 0.0)) throw numeric_error("scale matrix has a non-positive diagonal");
    w[j] = std::sqrt(omega(j, j));
  }
  return w;
}

inline Matrix sn_correlation(const Matrix& omega, const Vec& w) {
  Matrix ob(omega.rows(), omega.cols());
  for (std::size_t i = 0; i < omega.rows(); ++i)
    for (std::size_t j = 0; j < omega.cols(); ++j) ob(i, j) = omega(i, j) / (w[i] * w[j]);
  return ob;
}

// delta = Omega_bar alpha / sqrt(1 + alpha' Omega_bar alpha)
inline Vec sn_delta(const SnParams& par) {
  Vec w = sn_scales(par.omega);
  Matrix ob = sn_correlation(par.omega, w);
  Vec oa = matvec(ob, par.alpha);
  double a2 = dot(par.alpha, oa);
  Vec d(par.p());
  double s = std::sqrt(1.0 + a2);
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = oa[j] / s;
  return d;
}

// canonical slant magnitude alpha* = sqrt(alpha' Omega_bar alpha)
inline double sn_alpha_star(const SnParams& par) {
  Vec w = sn_scales(par.omega);
  Matrix ob = sn_correlation(par.omega, w);
  return std::sqrt(std::max(0.0, dot(par.alpha, matvec(ob, par.alpha))));
}

// Additive representation: X = xi + omega (delta |Z0| + V) with
// V ~ N_p(0, Omega_bar - delta delta'), Z0 standard normal.
// Per row the draw order is Z0 first, then the p components of V.
inline Sample sample_sn(const SnParams& par, std::size_t n, RandomStream& stream) {
  par.validate();
  const std::size_t p = par.p();
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
  // psd: the smallest eigenvalue 1/(1 + alpha*^2) underflows for boundary
  // slants, where the conditional law degenerates legitimately
  Matrix lc = psd_sqrt(c);
  Sample out(n, p);
  Vec z(p), v(p);
  for (std::size_t i = 0; i < n; ++i) {
    double z0 = std::fabs(stream.normal());
    stream.normals(z.data(), p);
    for (std::size_t a = 0; a < p; ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < p; ++b) acc += lc(a, b) * z[b];
      v[a] = acc;
    }
    for (std::size_t j = 0; j < p; ++j) out(i, j) = par.xi[j] + w[j] * (d[j] * z0 + v[j]);
  }
  return out;
}

// Characteristic function exp(i t'xi - t'Omega t / 2) (1 + i tau(delta' omega t)),
// tau the odd integral sqrt(2/pi) int_0^x exp(u^2/2) du.  Restricted to
// ||t|| <= 6: beyond that the modulus is numerically zero while tau alone
// overflows, so evaluations there are meaningless.
inline std::complex<double> cf_sn(const SnParams& par, const Vec& t) {
  par.validate();
  if (t.size() != par.p()) throw std::invalid_argument("cf_sn: dimension mismatch");
  if (norm2(t) > 6.0) throw std::invalid_argument("cf_sn: evaluation restricted to ||t|| <= 6");
  Vec w = sn_scales(par.omega);
  Vec d = sn_delta(par);
  double q = dot(t, matvec(par.omega, t));
  double phase = dot(t, par.xi);
  double u = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) u += d[j] * w[j] * t[j];
  std::complex<double> rot(std::cos(phase), std::sin(phase));
  if (std::fabs(u) <= 26.0) {
    std::complex<double> skewf(1.0, tau_cf(u));
    return std::exp(-0.5 * q) * rot * skewf;
  }
  // log-space evaluation: |1 + i tau| ~ |tau| and arg -> sign(u) pi/2
  double lt = log_tau_cf(std::fabs(u));
  double logmod = -0.5 * q + lt + 0.5 * std::log1p(std::exp(-2.0 * lt));
  double sg = u > 0.0 ? 1.0 : -1.0;
  double ang = sg * (0.5 * pi_const - std::exp(-lt));
  return std::exp(logmod) * rot * std::complex<double>(std::cos(ang), std::sin(ang));
}

inline double sn_logpdf(const SnParams& par, const Vec& x) {
  if (x.size() != par.p()) throw std::invalid_argument("sn_logpdf: dimension mismatch");
  if (!all_finite(x)) throw std::invalid_argument("sn_logpdf: non-finite point");
  const std::size_t p = par.p();
  Matrix l = cholesky(par.omega);
  Vec u(p);
  for (std::size_t j = 0; j < p; ++j) u[j] = x[j] - par.xi[j];
  Vec y = solve_lower(l, u);
  double quad = dot(y, y);
  double s = 0.0;
  for (std::size_t j = 0; j < p; ++j) s += par.alpha[j] * u[j] / std::sqrt(par.omega(j, j));
  return std::log(2.0) - 0.5 * p * std::log(2.0 * pi_const) - 0.5 * logdet_from_chol(l) -
         0.5 * quad + log_norm_cdf(s);
}

// average log-density over a sample, sharing one Cholesky factorization
inline double sn_loglik(const SnParams& par, const Sample& x) {
  const std::size_t p = par.p();
  Matrix l = cholesky(par.omega);
  Vec w = sn_scales(par.omega);
  double base = std::log(2.0) - 0.5 * p * std::log(2.0 * pi_const) - 0.5 * logdet_from_chol(l);
  double ll = 0.0;
  Vec u(p);
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < p; ++j) u[j] = x(i, j) - par.xi[j];
    Vec y = solve_lower(l, u);
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += par.alpha[j] * u[j] / w[j];
    ll += base - 0.5 * dot(y, y) + log_norm_cdf(s);
  }
  return ll;
}

struct CanonicalInfo {
  Matrix h;           // H' Omega H = I; data map is z = H' (x - xi)
  double alpha_star;  // slant magnitude surviving the canonical reduction
};

// Canonical transform: H = Omega^{-1/2} Q with Q an orthonormal basis whose
// first axis is the standardized skewness direction Omega^{-1/2} omega delta.
// Applying z = H'(x - xi) sends the law to (0, I, (alpha*, 0, ..., 0)).
inline CanonicalInfo canonical_sn(const SnParams& par) {
  par.validate();
  Matrix isq = spd_sqrt_inv(par.omega);
  double astar = sn_alpha_star(par);
  if (norm2(par.alpha) < 1e-10) return {isq, 0.0};
  Vec w = sn_scales(par.omega);
  Vec d = sn_delta(par);
  Vec dir(par.p());
  for (std::size_t j = 0; j < par.p(); ++j) dir[j] = w[j] * d[j];
  dir = matvec(isq, dir);
  Matrix q = orthonormal_basis_from(dir);
  return {matmul(isq, q), astar};
}

}  // namespace skewgof
