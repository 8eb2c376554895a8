#pragma once

#include <cmath>
#include <string>

#include "skewgof/fit_result.hpp"
#include "skewgof/fit_util.hpp"
#include "skewgof/nelder_mead.hpp"
#include "skewgof/tukey_gh.hpp"

namespace skewgof {

namespace detail {

// Letter-value starting estimates for one coordinate of the unmixed data:
// with w centered at its median, quantile ratios isolate g (the h factor
// cancels between symmetric quantiles) and a log-spread regression on
// z_p^2/2 gives h and a residual scale.
struct GhStart1D {
  double g = 0.0, h = 0.05, scale = 1.0;
};

inline GhStart1D gh_letter_values(std::vector<double> w) {
  GhStart1D out;
  double med = sample_median(w);
  for (double& v : w) v -= med;
  static const double upper[3] = {0.90, 0.95, 0.975};
  double gs[3];
  int gn = 0;
  for (double up : upper) {
    double hi = sample_quantile(w, up);
    double lo = sample_quantile(w, 1.0 - up);
    if (hi > 1e-12 && lo < -1e-12) gs[gn++] = std::log(hi / (-lo)) / norm_quantile(up);
  }
  if (gn > 0) {
    std::sort(gs, gs + gn);
    out.g = std::clamp(gs[gn / 2], -3.0, 3.0);
  }
  // spread regression: ln( g (q_hi - q_lo) / (e^{g z} - e^{-g z}) ) = ln scale + h z^2/2
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (double up : upper) {
    double hi = sample_quantile(w, up);
    double lo = sample_quantile(w, 1.0 - up);
    double spread = hi - lo;
    if (!(spread > 1e-12)) continue;
    double z = norm_quantile(up);
    double denom = (std::fabs(out.g) < 1e-8)
                       ? 2.0 * z
                       : (std::exp(out.g * z) - std::exp(-out.g * z)) / out.g;
    double y = std::log(spread / denom);
    double xx = 0.5 * z * z;
    sx += xx;
    sy += y;
    sxx += xx * xx;
    sxy += xx * y;
    ++m;
  }
  if (m >= 2) {
    double det = m * sxx - sx * sx;
    if (std::fabs(det) > 1e-12) {
      double slope = (m * sxy - sx * sy) / det;
      double icept = (sy - slope * sx) / m;
      out.h = std::clamp(slope, 0.0, 0.9);
      out.scale = std::exp(std::clamp(icept, -10.0, 10.0));
    }
  }
  return out;
}

}  // namespace detail

// Maximum likelihood for the componentwise transformed-normal family with a
// triangular mixing factor.  The exact likelihood inverts the transform per
// coordinate (safeguarded Newton); parameter points whose h = 0 range bound
// truncates too many rows are rejected, a handful of truncated rows only
// incur a penalty so the simplex can retreat gracefully.
inline FitResult fit_gh(const Sample& x, OptimOpts opts = {}) {
  const std::size_t p = x.p(), n = x.n();
  if (n <= 2 * p + 2) throw std::invalid_argument("fit_gh: need n > 2p + 2");
  if (!x.finite()) throw std::invalid_argument("fit_gh: non-finite data");

  // robust start: medians for location, winsorized covariance for the mixer
  Vec xi0(p);
  for (std::size_t j = 0; j < p; ++j) xi0[j] = detail::sample_median(detail::sample_column(x, j));
  Sample wins = x;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col = detail::sample_column(x, j);
    std::vector<double> absdev(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) absdev[i] = std::fabs(col[i] - xi0[j]);
    double mad = 1.4826 * detail::sample_median(absdev);
    if (!(mad > 1e-12)) mad = 1.0;
    for (std::size_t i = 0; i < wins.n(); ++i)
      wins(i, j) = std::clamp(wins(i, j), xi0[j] - 4.0 * mad, xi0[j] + 4.0 * mad);
  }
  Matrix omega0 = cholesky(wins.covariance());

  Vec g0(p), logh0(p);
  {
    // unmix with the trial factor, then read g/h off letter values per coordinate
    std::vector<std::vector<double>> wcols(p, std::vector<double>(n));
    Vec u(p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) u[j] = x(i, j) - xi0[j];
      Vec w = solve_lower(omega0, u);
      for (std::size_t j = 0; j < p; ++j) wcols[j][i] = w[j];
    }
    for (std::size_t j = 0; j < p; ++j) {
      detail::GhStart1D lv = detail::gh_letter_values(wcols[j]);
      g0[j] = lv.g;
      logh0[j] = std::log(std::clamp(lv.h, 1e-3, 0.9));
      for (std::size_t r = j; r < p; ++r) omega0(r, j) *= lv.scale;  // fold scale into column j
    }
  }

  const std::size_t lt = detail::ltri_size(p);
  const std::size_t dim = p + lt + 2 * p;
  auto unpack = [&](const Vec& t) {
    GhParams par;
    par.xi.assign(t.begin(), t.begin() + p);
    Matrix l = detail::unpack_ltri(t.data() + p, p);
    par.omega = l;
    par.g.assign(t.begin() + p + lt, t.begin() + p + lt + p);
    par.h.resize(p);
    for (std::size_t j = 0; j < p; ++j)
      par.h[j] = std::exp(std::clamp(t[p + lt + p + j], -20.0, 0.7));
    return par;
  };

  Vec t0(dim, 0.0);
  for (std::size_t j = 0; j < p; ++j) t0[j] = xi0[j];
  detail::pack_ltri(omega0, t0.data() + p);
  for (std::size_t j = 0; j < p; ++j) t0[p + lt + j] = g0[j];
  for (std::size_t j = 0; j < p; ++j) t0[p + lt + p + j] = logh0[j];

  Vec steps(dim, 0.15);
  for (std::size_t j = 0; j < p; ++j) steps[j] = 0.1 * omega0(j, j);
  for (std::size_t j = 0; j < p; ++j) steps[p + lt + j] = 0.2;
  for (std::size_t j = 0; j < p; ++j) steps[p + lt + p + j] = 0.4;

  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t fail_cap = n / 5;
  auto nll = [&](const Vec& t) -> double {
    GhParams par = unpack(t);
    std::size_t failed = 0;
    double ll = gh_loglik(par, x, &failed);
    if (failed > fail_cap) return std::numeric_limits<double>::infinity();
    return -ll * inv_n;
  };

  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), t0, steps, opts);
  GhParams best = unpack(r.x);
  std::size_t failed = 0;
  double ll = gh_loglik(best, x, &failed);
  FitResult out;
  out.params = best;
  out.objective = ll;
  out.converged = r.converged;
  out.iterations = r.iterations;
  if (failed > 0)
    out.notes = std::to_string(failed) + " rows outside the h=0 transform range at the optimum";
  else if (!r.converged)
    out.notes = "optimizer hit its iteration budget";
  return out;
}

// Shape-frozen variant: g and h pinned, location and mixing factor free.
inline FitResult fit_gh_profile(const Sample& x, const Vec& g_fixed, const Vec& h_fixed,
                                OptimOpts opts = {}) {
  const std::size_t p = x.p(), n = x.n();
  if (n <= p + 2) throw std::invalid_argument("fit_gh_profile: need n > p + 2");
  if (g_fixed.size() != p || h_fixed.size() != p)
    throw std::invalid_argument("fit_gh_profile: shape dimension mismatch");

  Vec xi0(p);
  for (std::size_t j = 0; j < p; ++j) xi0[j] = detail::sample_median(detail::sample_column(x, j));
  Sample wins = x;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col = detail::sample_column(x, j);
    std::vector<double> absdev(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) absdev[i] = std::fabs(col[i] - xi0[j]);
    double mad = 1.4826 * detail::sample_median(absdev);
    if (!(mad > 1e-12)) mad = 1.0;
    for (std::size_t i = 0; i < wins.n(); ++i)
      wins(i, j) = std::clamp(wins(i, j), xi0[j] - 4.0 * mad, xi0[j] + 4.0 * mad);
  }
  Matrix omega0 = cholesky(wins.covariance());

  const std::size_t lt = detail::ltri_size(p);
  const std::size_t dim = p + lt;
  auto unpack = [&](const Vec& t) {
    GhParams par;
    par.xi.assign(t.begin(), t.begin() + p);
    par.omega = detail::unpack_ltri(t.data() + p, p);
    par.g = g_fixed;
    par.h = h_fixed;
    return par;
  };
  Vec t0(dim, 0.0);
  for (std::size_t j = 0; j < p; ++j) t0[j] = xi0[j];
  detail::pack_ltri(omega0, t0.data() + p);
  Vec steps(dim, 0.15);
  for (std::size_t j = 0; j < p; ++j) steps[j] = 0.1 * omega0(j, j);

  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t fail_cap = n / 5;
  auto nll = [&](const Vec& t) -> double {
    GhParams par = unpack(t);
    std::size_t failed = 0;
    double ll = gh_loglik(par, x, &failed);
    if (failed > fail_cap) return std::numeric_limits<double>::infinity();
    return -ll * inv_n;
  };
  OptimResult r = nelder_mead_restarted(detail::guard_objective(nll), t0, steps, opts);
  GhParams best = unpack(r.x);
  std::size_t failed = 0;
  double ll = gh_loglik(best, x, &failed);
  FitResult out;
  out.params = best;
  out.objective = ll;
  out.converged = r.converged;
  out.iterations = r.iterations;
  if (failed > 0)
    out.notes = std::to_string(failed) + " rows outside the h=0 transform range at the optimum";
  return out;
}

}  // namespace skewgof
