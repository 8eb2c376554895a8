#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "skewgof/fit_result.hpp"
#include "skewgof/fit_util.hpp"
#include "skewgof/nelder_mead.hpp"
#include "skewgof/skew_laplace.hpp"

namespace skewgof {

// EM for the skewed Laplace mixture.  The mixing weight posterior is
// generalized inverse Gaussian with index 1/2, so the E-step moments
// t_i = E[W_i | x_i] and s_i = E[1/W_i | x_i] are elementary, and the M-step
// is a weighted least squares update:
//   alpha = n (xbar - xi) / T,   xi = (n^2 xbar - T sum_i s_i x_i) / (n^2 - T S),
//   Omega = (1/n) sum_i [ s_i u u' - u alpha' - alpha u' + t_i alpha alpha' ],
// with T = sum t_i, S = sum s_i, u = x_i - xi.
inline FitResult fit_sl(const Sample& x, int max_iter = 2000, double tol = 1e-8,
                        std::vector<double>* ll_trace = nullptr) {
  const std::size_t p = x.p(), n = x.n();
  if (n <= p + 2) throw std::invalid_argument("fit_sl: need n > p + 2");
  if (!x.finite()) throw std::invalid_argument("fit_sl: non-finite data");

  Vec mean = x.column_mean();
  Matrix s_cov = x.covariance();
  const double dn = static_cast<double>(n);
  const double pw = static_cast<double>(p + 1);  // E[W]

  SlParams par;
  par.xi.resize(p);
  for (std::size_t j = 0; j < p; ++j) par.xi[j] = detail::sample_median(detail::sample_column(x, j));
  par.alpha.resize(p);
  for (std::size_t j = 0; j < p; ++j) par.alpha[j] = (mean[j] - par.xi[j]) / pw;
  par.omega = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      par.omega(i, j) = s_cov(i, j) / pw - 2.0 * par.alpha[i] * par.alpha[j];
  try {
    cholesky(par.omega);
  } catch (const numeric_error&) {
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) par.omega(i, j) = s_cov(i, j) / pw;
  }

  std::string notes;
  double ll = sl_loglik(par, x);
  if (ll_trace) ll_trace->assign(1, ll);

  Vec t(n), s(n);
  Vec u(p);
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    // E-step
    Matrix l = cholesky(par.omega);
    Vec ya = solve_lower(l, par.alpha);
    double a = dot(ya, ya);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) u[j] = x(i, j) - par.xi[j];
      Vec yu = solve_lower(l, u);
      SlCondMoments cm = sl_cond_moments(dot(yu, yu), a);
      t[i] = cm.ew;
      s[i] = cm.ewinv;
    }
    // M-step
    double tsum = 0.0, ssum = 0.0;
    Vec sx(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      tsum += t[i];
      ssum += s[i];
      for (std::size_t j = 0; j < p; ++j) sx[j] += s[i] * x(i, j);
    }
    double denom = dn * dn - tsum * ssum;
    Vec xi_new(par.xi);
    if (std::fabs(denom) > 1e-12 * dn * dn) {
      for (std::size_t j = 0; j < p; ++j)
        xi_new[j] = (dn * dn * mean[j] - tsum * sx[j]) / denom;
    }
    Vec alpha_new(p);
    for (std::size_t j = 0; j < p; ++j) alpha_new[j] = dn * (mean[j] - xi_new[j]) / tsum;
    Matrix omega_new(p, p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) u[j] = x(i, j) - xi_new[j];
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = r; c < p; ++c)
          omega_new(r, c) += s[i] * u[r] * u[c] - u[r] * alpha_new[c] - alpha_new[r] * u[c] +
                             t[i] * alpha_new[r] * alpha_new[c];
    }
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = r; c < p; ++c) omega_new(c, r) = omega_new(r, c) /= dn;
    try {
      cholesky(omega_new);
    } catch (const numeric_error&) {
      double tr = 0.0;
      for (std::size_t j = 0; j < p; ++j) tr += omega_new(j, j);
      double ridge = 1e-8 * (std::fabs(tr) / p + 1.0);
      for (std::size_t j = 0; j < p; ++j) omega_new(j, j) += ridge;
      if (notes.empty()) notes = "scale update regularized with a small ridge";
    }

    SlParams next{xi_new, omega_new, alpha_new};
    double ll_new = sl_loglik(next, x);
    par = next;
    if (ll_trace) ll_trace->push_back(ll_new);
    if (ll_new - ll <= tol) {
      ll = ll_new;
      converged = true;
      ++it;
      break;
    }
    ll = ll_new;
  }

  FitResult out;
  out.params = par;
  out.objective = ll;
  out.converged = converged;
  out.iterations = it;
  out.notes = notes;
  return out;
}

// Shape-frozen variant: the canonical slant ||Omega^{-1/2} alpha|| is pinned
// at alpha_star0 by writing alpha = a0 L v / ||v|| (L the Cholesky factor of
// Omega, so Omega^{-1/2} L is orthogonal); location, scale and direction are
// free, optimized by Nelder-Mead on the closed-form likelihood.
inline FitResult fit_sl_profile(const Sample& x, double alpha_star0, OptimOpts opts = {}) {
  const std::size_t p = x.p();
  if (x.n() <= p + 2) throw std::invalid_argument("fit_sl_profile: need n > p + 2");
  if (!(alpha_star0 >= 0.0)) throw std::invalid_argument("fit_sl_profile: alpha_star0 must be >= 0");
  const bool with_dir = alpha_star0 > 0.0;
  const std::size_t lt = detail::ltri_size(p);
  const std::size_t dim = p + lt + (with_dir ? p : 0);

  FitResult em = fit_sl(x, 200);  // cheap unconstrained pass for starting values
  const SlParams& par0 = std::get<SlParams>(em.params);

  auto unpack = [&](const Vec& t) {
    SlParams par;
    par.xi.assign(t.begin(), t.begin() + p);
    Matrix l = detail::unpack_ltri(t.data() + p, p);
    par.omega = detail::ltri_to_spd(l);
    par.alpha.assign(p, 0.0);
    if (with_dir) {
      Vec v(t.begin() + p + lt, t.end());
      double nv = norm2(v);
      if (nv < 1e-12) nv = 1.0;
      Vec lv(p, 0.0);
      for (std::size_t r = 0; r < p; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c <= r; ++c) acc += l(r, c) * v[c];
        lv[r] = acc;
      }
      for (std::size_t r = 0; r < p; ++r) par.alpha[r] = alpha_star0 * lv[r] / nv;
    }
    return par;
  };

  Vec t0(dim, 0.0);
  for (std::size_t j = 0; j < p; ++j) t0[j] = par0.xi[j];
  Matrix l0 = cholesky(par0.omega);
  detail::pack_ltri(l0, t0.data() + p);
  if (with_dir) {
    Vec dir = solve_lower(l0, par0.alpha);  // invert alpha = L v to seed the direction
    if (norm2(dir) < 1e-8) dir[0] = 1.0;
    double nd = norm2(dir);
    for (std::size_t j = 0; j < p; ++j) t0[p + lt + j] = dir[j] / nd;
  }
  Vec steps(dim, 0.15);
  for (std::size_t j = 0; j < p; ++j) steps[j] = 0.1 * std::sqrt(par0.omega(j, j));

  const double inv_n = 1.0 / static_cast<double>(x.n());
  auto nll = [&](const Vec& t) { return -sl_loglik(unpack(t), x) * inv_n; };
  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), t0, steps, opts);

  FitResult out;
  out.params = unpack(r.x);
  out.objective = -r.f * static_cast<double>(x.n());
  out.converged = r.converged;
  out.iterations = r.iterations;
  return out;
}

}  // namespace skewgof
