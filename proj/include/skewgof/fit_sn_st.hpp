#pragma once

#include <cmath>
#include <string>

#include "skewgof/fit_result.hpp"
#include "skewgof/fit_util.hpp"
#include "skewgof/nelder_mead.hpp"
#include "skewgof/skew_normal.hpp"
#include "skewgof/skew_t.hpp"

namespace skewgof {

// Method-of-moments starting point: per-coordinate skewness is inverted to a
// deformation delta_j, which fixes trial scales and location; the slant is
// recovered from delta through the correlation matrix.  Shift-equivariant by
// construction.
inline SnParams sn_moment_start(const Sample& x) {
  const std::size_t p = x.p(), n = x.n();
  Vec mean = x.column_mean();
  Matrix s = x.covariance();
  Vec delta(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double sd = std::sqrt(std::max(s(j, j), 1e-12));
    double m3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = (x(i, j) - mean[j]) / sd;
      m3 += d * d * d;
    }
    m3 /= static_cast<double>(n);
    // the skew-normal family supports |skewness| < 0.9953; clip inside it
    double g1 = std::clamp(m3, -0.98, 0.98);
    double r = std::cbrt(2.0 * g1 / (4.0 - pi_const));
    delta[j] = std::copysign(std::sqrt(0.5 * pi_const) * std::fabs(r) / std::sqrt(1.0 + r * r), r);
    delta[j] = std::clamp(delta[j], -0.7, 0.7);
  }
  Vec omega_tilde(p);
  for (std::size_t j = 0; j < p; ++j)
    omega_tilde[j] = std::sqrt(std::max(s(j, j), 1e-12) / (1.0 - 2.0 * delta[j] * delta[j] / pi_const));
  SnParams par;
  par.xi.resize(p);
  for (std::size_t j = 0; j < p; ++j)
    par.xi[j] = mean[j] - omega_tilde[j] * delta[j] * std::sqrt(2.0 / pi_const);
  par.omega = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      par.omega(i, j) = s(i, j) + (2.0 / pi_const) * (omega_tilde[i] * delta[i]) *
                                      (omega_tilde[j] * delta[j]);
  // keep the implied delta strictly inside the feasible ellipsoid
  Vec w = sn_scales(par.omega);
  Matrix ob = sn_correlation(par.omega, w);
  Matrix obinv = inverse_spd(ob);
  double q = dot(delta, matvec(obinv, delta));
  int guard = 0;
  while (q >= 0.98 && guard++ < 60) {
    for (double& d : delta) d *= 0.9;
    q = dot(delta, matvec(obinv, delta));
  }
  Vec oi = matvec(obinv, delta);
  double denom = std::sqrt(std::max(1.0 - q, 1e-4));
  par.alpha.resize(p);
  for (std::size_t j = 0; j < p; ++j) par.alpha[j] = oi[j] / denom;
  return par;
}

namespace detail {

struct SnPack {
  std::size_t p;
  bool with_nu = false;

  std::size_t dim() const { return 2 * p + ltri_size(p) + (with_nu ? 1 : 0); }

  Vec pack(const SnParams& par, double nu = 0.0) const {
    Vec t(dim());
    for (std::size_t j = 0; j < p; ++j) t[j] = par.xi[j];
    pack_ltri(cholesky(par.omega), t.data() + p);
    for (std::size_t j = 0; j < p; ++j) t[p + ltri_size(p) + j] = par.alpha[j];
    if (with_nu) t[dim() - 1] = std::log(nu);
    return t;
  }

  SnParams unpack(const Vec& t, double* nu = nullptr) const {
    SnParams par;
    par.xi.assign(t.begin(), t.begin() + p);
    par.omega = ltri_to_spd(unpack_ltri(t.data() + p, p));
    par.alpha.assign(t.begin() + p + ltri_size(p), t.begin() + 2 * p + ltri_size(p));
    if (with_nu && nu) *nu = std::min(std::exp(t[dim() - 1]), st_nu_normal_limit);
    return par;
  }

  Vec steps(const SnParams& start) const {
    Vec s(dim(), 0.15);
    Vec w = sn_scales(start.omega);
    for (std::size_t j = 0; j < p; ++j) s[j] = 0.1 * w[j];                   // location
    for (std::size_t j = 0; j < p; ++j)
      s[p + ltri_size(p) + j] = 0.3 * (1.0 + std::fabs(start.alpha[j]));    // slant
    if (with_nu) s[dim() - 1] = 0.5;
    return s;
  }
};

}  // namespace detail

// Maximum likelihood for the skew-normal via Nelder-Mead on
// (xi, chol factor with log diagonal, alpha).
inline FitResult fit_sn(const Sample& x, OptimOpts opts = {}) {
  const std::size_t p = x.p();
  if (x.n() <= p + 2) throw std::invalid_argument("fit_sn: need n > p + 2");
  if (!x.finite()) throw std::invalid_argument("fit_sn: non-finite data");
  detail::SnPack pk{p, false};
  SnParams start = sn_moment_start(x);
  const double inv_n = 1.0 / static_cast<double>(x.n());
  auto nll = [&](const Vec& t) {
    SnParams par = pk.unpack(t);
    return -sn_loglik(par, x) * inv_n;
  };
  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), pk.pack(start), pk.steps(start), opts);
  FitResult out;
  out.params = pk.unpack(r.x);
  out.objective = -r.f * static_cast<double>(x.n());
  out.converged = r.converged;
  out.iterations = r.iterations;
  if (!r.converged) out.notes = "optimizer hit its iteration budget";
  return out;
}

// Skew-t maximum likelihood; nu enters on a log scale, initialized at 10 and
// capped at the skew-normal limit.
inline FitResult fit_st(const Sample& x, OptimOpts opts = {}) {
  const std::size_t p = x.p();
  if (x.n() <= p + 2) throw std::invalid_argument("fit_st: need n > p + 2");
  if (!x.finite()) throw std::invalid_argument("fit_st: non-finite data");
  detail::SnPack pk{p, true};
  SnParams start = sn_moment_start(x);
  const double inv_n = 1.0 / static_cast<double>(x.n());
  auto nll = [&](const Vec& t) {
    double nu = 0.0;
    SnParams par = pk.unpack(t, &nu);
    StParams st{par.xi, par.omega, par.alpha, nu};
    return -st_loglik(st, x) * inv_n;
  };
  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), pk.pack(start, 10.0), pk.steps(start), opts);
  double nu = 0.0;
  SnParams par = pk.unpack(r.x, &nu);
  FitResult out;
  out.params = StParams{par.xi, par.omega, par.alpha, nu};
  out.objective = -r.f * static_cast<double>(x.n());
  out.converged = r.converged;
  out.iterations = r.iterations;
  if (!r.converged) out.notes = "optimizer hit its iteration budget";
  return out;
}

namespace detail {

// Profile parameterization with the canonical slant magnitude frozen:
// alpha(v) = a0 * v / sqrt(v' Omega_bar v), so alpha* = a0 exactly for every
// trial point while the direction v stays free.
struct SnProfilePack {
  std::size_t p;
  double alpha_star0;

  bool with_direction() const { return alpha_star0 > 0.0; }
  std::size_t dim() const { return p + ltri_size(p) + (with_direction() ? p : 0); }

  SnParams unpack(const Vec& t) const {
    SnParams par;
    par.xi.assign(t.begin(), t.begin() + p);
    par.omega = ltri_to_spd(unpack_ltri(t.data() + p, p));
    par.alpha.assign(p, 0.0);
    if (with_direction()) {
      Vec v(t.begin() + p + ltri_size(p), t.end());
      Vec w = sn_scales(par.omega);
      Matrix ob = sn_correlation(par.omega, w);
      double q = std::sqrt(std::max(dot(v, matvec(ob, v)), 1e-12));
      for (std::size_t j = 0; j < p; ++j) par.alpha[j] = alpha_star0 * v[j] / q;
    }
    return par;
  }
};

}  // namespace detail

// Fit with the shape fixed: location/scale (and slant direction) free, the
// canonical slant magnitude pinned to alpha_star0 (and nu pinned for the
// skew-t variant).  Used by the known-shape testing protocol.
inline FitResult fit_sn_profile(const Sample& x, double alpha_star0, OptimOpts opts = {}) {
  const std::size_t p = x.p();
  if (x.n() <= p + 2) throw std::invalid_argument("fit_sn_profile: need n > p + 2");
  if (!(alpha_star0 >= 0.0)) throw std::invalid_argument("fit_sn_profile: alpha_star0 must be >= 0");
  detail::SnProfilePack pk{p, alpha_star0};
  SnParams start = sn_moment_start(x);
  const double inv_n = 1.0 / static_cast<double>(x.n());
  auto nll = [&](const Vec& t) { return -sn_loglik(pk.unpack(t), x) * inv_n; };

  Vec t0(pk.dim(), 0.0);
  for (std::size_t j = 0; j < p; ++j) t0[j] = start.xi[j];
  detail::pack_ltri(cholesky(start.omega), t0.data() + p);
  if (pk.with_direction()) {
    Vec dir = start.alpha;
    if (norm2(dir) < 1e-8) dir[0] = 1.0;
    double nd = norm2(dir);
    for (std::size_t j = 0; j < p; ++j) t0[p + detail::ltri_size(p) + j] = dir[j] / nd;
  }
  Vec steps(pk.dim(), 0.15);
  Vec w = sn_scales(start.omega);
  for (std::size_t j = 0; j < p; ++j) steps[j] = 0.1 * w[j];
  if (pk.with_direction())
    for (std::size_t j = 0; j < p; ++j) steps[p + detail::ltri_size(p) + j] = 0.25;

  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), t0, steps, opts);
  FitResult out;
  out.params = pk.unpack(r.x);
  out.objective = -r.f * static_cast<double>(x.n());
  out.converged = r.converged;
  out.iterations = r.iterations;
  return out;
}

inline FitResult fit_st_profile(const Sample& x, double alpha_star0, double nu0,
                                OptimOpts opts = {}) {
  const std::size_t p = x.p();
  if (x.n() <= p + 2) throw std::invalid_argument("fit_st_profile: need n > p + 2");
  if (!(alpha_star0 >= 0.0) || !(nu0 > 0.0))
    throw std::invalid_argument("fit_st_profile: bad shape parameters");
  detail::SnProfilePack pk{p, alpha_star0};
  SnParams start = sn_moment_start(x);
  const double inv_n = 1.0 / static_cast<double>(x.n());
  auto nll = [&](const Vec& t) {
    SnParams par = pk.unpack(t);
    StParams st{par.xi, par.omega, par.alpha, nu0};
    return -st_loglik(st, x) * inv_n;
  };
  Vec t0(pk.dim(), 0.0);
  for (std::size_t j = 0; j < p; ++j) t0[j] = start.xi[j];
  detail::pack_ltri(cholesky(start.omega), t0.data() + p);
  if (pk.with_direction()) {
    Vec dir = start.alpha;
    if (norm2(dir) < 1e-8) dir[0] = 1.0;
    double nd = norm2(dir);
    for (std::size_t j = 0; j < p; ++j) t0[p + detail::ltri_size(p) + j] = dir[j] / nd;
  }
  Vec steps(pk.dim(), 0.15);
  Vec w = sn_scales(start.omega);
  for (std::size_t j = 0; j < p; ++j) steps[j] = 0.1 * w[j];
  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), t0, steps, opts);
  FitResult out;
  SnParams par = pk.unpack(r.x);
  out.params = StParams{par.xi, par.omega, par.alpha, nu0};
  out.objective = -r.f * static_cast<double>(x.n());
  out.converged = r.converged;
  out.iterations = r.iterations;
  return out;
}

}  // namespace skewgof
