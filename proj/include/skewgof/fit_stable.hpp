#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "skewgof/alpha_stable.hpp"
#include "skewgof/fit_result.hpp"
#include "skewgof/fit_util.hpp"
#include "skewgof/nnls.hpp"

namespace skewgof {

// One-dimensional stable parameter read-off from the empirical characteristic
// function: on a grid t_k the log-log modulus regression
//   ln(-ln |phi(t)|^2) = ln(2 sigma^alpha) + alpha ln t
// gives alpha and sigma, and the argument regression
//   arg phi(t) = mu t + beta sigma^alpha tan(pi alpha/2) t^alpha
// gives mu and beta (with the log regressor variant at alpha = 1).  Data are
// median-centered and interquartile-scaled first; a two-point variant on an
// adaptive pair of grid points serves as the fallback when the regression
// grid degenerates.
struct Stable1D {
  double alpha = 2.0, sigma = 1.0, beta = 0.0, mu = 0.0;
  bool fallback = false;
};

namespace detail {

struct EcfPoint {
  double t, mod2, arg;
};

inline EcfPoint ecf_point_1d(const std::vector<double>& d, double t) {
  double re = 0.0, im = 0.0;
  for (double v : d) {
    re += std::cos(t * v);
    im += std::sin(t * v);
  }
  re /= static_cast<double>(d.size());
  im /= static_cast<double>(d.size());
  return {t, re * re + im * im, std::atan2(im, re)};
}

// alpha_fixed > 0 freezes the index: the modulus regression keeps only its
// intercept (the scale), which removes the per-direction index noise once a
// pooled index is available.
inline Stable1D stable_ecf_1d(const std::vector<double>& y, double alpha_fixed = 0.0) {
  const std::size_t n = y.size();
  Stable1D out;
  if (n < 20) throw std::invalid_argument("stable_ecf_1d: need at least 20 observations");
  std::vector<double> sorted(y);
  std::sort(sorted.begin(), sorted.end());
  double med = sample_quantile(sorted, 0.5);
  double c = 0.5 * (sample_quantile(sorted, 0.75) - sample_quantile(sorted, 0.25));
  if (!(c > 1e-12)) c = 1e-12;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = (y[i] - med) / c;

  // regression grid; rescaled when the moduli leave the informative band
  double gscale = 1.0;
  std::vector<EcfPoint> pts;
  for (int attempt = 0; attempt < 6; ++attempt) {
    pts.clear();
    int low = 0, high = 0;
    for (int k = 1; k <= 10; ++k) {
      EcfPoint pt = ecf_point_1d(d, 0.1 * k * gscale);
      if (pt.mod2 <= 0.05) {
        ++low;
        continue;
      }
      if (pt.mod2 >= 0.995) {
        ++high;
        continue;
      }
      pts.push_back(pt);
    }
    if (pts.size() >= 4) break;
    gscale *= (high > low) ? 2.0 : 0.5;
  }

  bool ok = alpha_fixed > 0.0 ? !pts.empty() : pts.size() >= 4;
  if (ok && alpha_fixed > 0.0) {
    double sy = 0.0;
    for (const auto& pt : pts)
      sy += std::log(-std::log(pt.mod2)) - alpha_fixed * std::log(pt.t);
    double icept = sy / static_cast<double>(pts.size());
    out.alpha = alpha_fixed;
    out.sigma = std::pow(0.5 * std::exp(icept), 1.0 / alpha_fixed);
  } else if (ok) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : pts) {
      double lx = std::log(pt.t), ly = std::log(-std::log(pt.mod2));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    double m = static_cast<double>(pts.size());
    double det = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / det;
    double icept = (sy - slope * sx) / m;
    if (std::isfinite(slope) && slope > 0.05 && slope < 2.3) {
      out.alpha = std::clamp(slope, 0.1, 2.0);
      out.sigma = std::pow(0.5 * std::exp(icept), 1.0 / out.alpha);
    } else {
      ok = false;
    }
  }

  if (!ok) {
    // two-point fallback: pick a strong and a weak modulus on a wide scan
    out.fallback = true;
    EcfPoint pa{0, 0, 0}, pb{0, 0, 0};
    bool have_a = false, have_b = false;
    for (int j = -6; j <= 8; ++j) {
      EcfPoint pt = ecf_point_1d(d, 0.05 * std::pow(2.0, j));
      if (pt.mod2 >= 0.6 && pt.mod2 < 0.999) {
        pa = pt;
        have_a = true;
      }
      if (!have_b && have_a && pt.mod2 <= 0.25 && pt.mod2 > 1e-6) {
        pb = pt;
        have_b = true;
      }
    }
    if (alpha_fixed > 0.0 && have_a) {
      // one informative point suffices once the index is known
      out.alpha = alpha_fixed;
      out.sigma = std::pow(0.5 * -std::log(pa.mod2), 1.0 / alpha_fixed) / pa.t;
      pts = {pa};
      if (have_b && pb.t > pa.t) pts.push_back(pb);
    } else if (alpha_fixed <= 0.0 && have_a && have_b && pb.t > pa.t) {
      double la = -std::log(pa.mod2), lb = -std::log(pb.mod2);
      double slope = std::log(lb / la) / std::log(pb.t / pa.t);
      out.alpha = std::clamp(slope, 0.1, 2.0);
      out.sigma = std::pow(0.5 * la / std::pow(pa.t, out.alpha), 1.0 / out.alpha);
      pts = {pa, pb};
    } else if (alpha_fixed > 0.0) {
      // hopeless tail with a known index: unit scale on the normalized data
      out.alpha = alpha_fixed;
      out.sigma = c;
      out.beta = 0.0;
      out.mu = med;
      return out;
    } else {
      // hopeless tail: treat as Gaussian
      double s2 = 0.0;
      for (double v : d) s2 += v * v;
      s2 /= static_cast<double>(n);
      out.alpha = 2.0;
      out.sigma = c * std::sqrt(std::max(s2, 1e-12) / 2.0);
      double mean = 0.0;
      for (double v : d) mean += v;
      out.beta = 0.0;
      out.mu = c * (mean / static_cast<double>(n)) + med;
      return out;
    }
  }

  // argument regression on the usable points
  const bool near_one = std::fabs(out.alpha - 1.0) <= 0.02;
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (const auto& pt : pts) {
    double x1 = pt.t;
    double x2 = near_one ? -(2.0 / pi_const) * pt.t * std::log(pt.t) : std::pow(pt.t, out.alpha);
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    b1 += x1 * pt.arg;
    b2 += x2 * pt.arg;
  }
  double det2 = s11 * s22 - s12 * s12;
  double mu_n = 0.0, kappa = 0.0;
  if (std::fabs(det2) > 1e-14 * (s11 * s22 + 1e-30)) {
    mu_n = (b1 * s22 - b2 * s12) / det2;
    kappa = (b2 * s11 - b1 * s12) / det2;
  } else if (s11 > 0.0) {
    mu_n = b1 / s11;
  }
  if (near_one) {
    out.beta = std::clamp(kappa / std::max(out.sigma, 1e-12), -1.0, 1.0);
  } else {
    double tanpa = (out.alpha == 2.0) ? 0.0 : std::tan(0.5 * pi_const * out.alpha);
    double denom = std::pow(out.sigma, out.alpha) * tanpa;
    out.beta = (std::fabs(tanpa) < 0.02) ? 0.0 : std::clamp(kappa / denom, -1.0, 1.0);
  }

  // undo the centering/scaling; the alpha = 1 branch picks up the log term
  double sigma_d = out.sigma;
  out.sigma = c * sigma_d;
  if (near_one) {
    out.mu = c * mu_n + med - (2.0 / pi_const) * out.beta * out.sigma * std::log(c);
  } else {
    out.mu = c * mu_n + med;
  }
  return out;
}

}  // namespace detail

// Spectral-measure estimation for the bivariate stable family: the index is a
// trimmed mean of one-dimensional ECF estimates over a fan of projection
// directions, the atom weights on those same directions come from
// non-negative least squares on the projected scale/skew equations, and the
// location is read back from the projected location estimates.
inline FitResult fit_as(const Sample& x, std::size_t ndir = 24) {
  if (x.p() != 2) throw std::invalid_argument("fit_as: projection estimator is bivariate only");
  if (x.n() < 100) throw std::invalid_argument("fit_as: need n >= 100");
  const std::size_t nd = ndir;
  std::vector<Vec> u(nd, Vec(2, 0.0));
  for (std::size_t k = 0; k < nd; ++k) {
    double ang = 2.0 * pi_const * static_cast<double>(k + 1) / static_cast<double>(nd);
    u[k] = {std::cos(ang), std::sin(ang)};
  }

  std::vector<Stable1D> proj(nd);
  std::size_t fallbacks = 0;
  std::vector<double> y(x.n());
  for (std::size_t k = 0; k < nd; ++k) {
    for (std::size_t i = 0; i < x.n(); ++i) y[i] = u[k][0] * x(i, 0) + u[k][1] * x(i, 1);
    proj[k] = detail::stable_ecf_1d(y);
    if (proj[k].fallback) ++fallbacks;
  }

  // 20% trimmed mean of the projected indices
  std::vector<double> alphas(nd);
  for (std::size_t k = 0; k < nd; ++k) alphas[k] = proj[k].alpha;
  std::sort(alphas.begin(), alphas.end());
  std::size_t trim = nd / 5;
  double asum = 0.0;
  for (std::size_t k = trim; k < nd - trim; ++k) asum += alphas[k];
  double alpha_hat = std::clamp(asum / static_cast<double>(nd - 2 * trim), 0.1, 2.0);

  // second pass: re-read every projection's scale, skew and location with the
  // index frozen at the pooled value, so per-direction index noise does not
  // leak into the weight system through sigma(u)^alpha
  fallbacks = 0;
  for (std::size_t k = 0; k < nd; ++k) {
    for (std::size_t i = 0; i < x.n(); ++i) y[i] = u[k][0] * x(i, 0) + u[k][1] * x(i, 1);
    proj[k] = detail::stable_ecf_1d(y, alpha_hat);
    if (proj[k].fallback) ++fallbacks;
  }

  // weights by NNLS on sigma(u)^a = sum_i g_i |u's_i|^a  and
  // beta(u) sigma(u)^a = sum_i g_i sign(u's_i) |u's_i|^a, atoms on the fan
  Matrix a(2 * nd, nd);
  Vec b(2 * nd, 0.0);
  for (std::size_t k = 0; k < nd; ++k) {
    double sa = std::pow(proj[k].sigma, alpha_hat);
    b[k] = sa;
    b[nd + k] = proj[k].beta * sa;
    for (std::size_t i = 0; i < nd; ++i) {
      double w = u[k][0] * u[i][0] + u[k][1] * u[i][1];
      double aw = std::fabs(w);
      double pw = (aw < 1e-14) ? 0.0 : std::pow(aw, alpha_hat);
      a(k, i) = pw;
      a(nd + k, i) = (w > 0.0 ? pw : (w < 0.0 ? -pw : 0.0));
    }
  }
  Vec gamma = nnls(a, b);
  double total = 0.0;
  for (double gv : gamma) total += gv;
  if (!(total > 0.0)) throw numeric_error("fit_as: all atom weights collapsed to zero");

  AsParams par;
  par.alpha = alpha_hat;
  par.xi = Vec(2, 0.0);
  for (std::size_t i = 0; i < nd; ++i)
    if (gamma[i] > 1e-10 * total) par.atoms.push_back({u[i], gamma[i]});

  // location: mu(u) = u'xi - tan(pi a/2) sum_i g_i u's_i for a != 1,
  //           mu(u) = u'xi - (2/pi) sum_i g_i (u's_i) ln|u's_i| at a = 1
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
  const bool near_one = std::fabs(alpha_hat - 1.0) <= 0.02;
  double tanpa = (alpha_hat == 2.0) ? 0.0 : std::tan(0.5 * pi_const * alpha_hat);
  for (std::size_t k = 0; k < nd; ++k) {
    double target = proj[k].mu;
    if (near_one) {
      double cu = 0.0;
      for (const auto& atom : par.atoms) {
        double w = u[k][0] * atom.s[0] + u[k][1] * atom.s[1];
        if (std::fabs(w) > 1e-14) cu += atom.gamma * w * std::log(std::fabs(w));
      }
      target += (2.0 / pi_const) * cu;
    }
    s11 += u[k][0] * u[k][0];
    s12 += u[k][0] * u[k][1];
    s22 += u[k][1] * u[k][1];
    r1 += u[k][0] * target;
    r2 += u[k][1] * target;
  }
  double det = s11 * s22 - s12 * s12;
  Vec xi_tilde = {(r1 * s22 - r2 * s12) / det, (r2 * s11 - r1 * s12) / det};
  if (near_one) {
    par.xi = xi_tilde;
  } else {
    Vec shift(2, 0.0);
    for (const auto& atom : par.atoms) {
      shift[0] += atom.gamma * atom.s[0];
      shift[1] += atom.gamma * atom.s[1];
    }
    par.xi = {xi_tilde[0] + tanpa * shift[0], xi_tilde[1] + tanpa * shift[1]};
  }

  // report the residual of the weight system as the fit criterion
  double res = 0.0;
  for (std::size_t r = 0; r < 2 * nd; ++r) {
    double s = b[r];
    for (std::size_t i = 0; i < nd; ++i) s -= a(r, i) * gamma[i];
    res += s * s;
  }
  FitResult out;
  out.params = par;
  out.objective = -std::sqrt(res);
  out.converged = true;
  out.iterations = 1;
  if (fallbacks > 0)
    out.notes = std::to_string(fallbacks) + " of " + std::to_string(nd) +
                " projections used the two-point fallback";
  return out;
}

// Location-only fit with the spectral measure and index frozen: each
// projected location is estimated with the known skew term subtracted, then
// the location solves the direction system by least squares.
inline FitResult fit_as_location_profile(const Sample& x, const AsParams& shape,
                                         std::size_t ndir = 24) {
  if (x.p() != 2) throw std::invalid_argument("fit_as_location_profile: bivariate only");
  shape.validate();
  const double alpha = shape.alpha;
  const bool near_one = std::fabs(alpha - 1.0) <= 0.02;
  const double tanpa = (alpha == 2.0) ? 0.0 : std::tan(0.5 * pi_const * alpha);
  const std::size_t nd = ndir;

  double s11 = 0.0, s12 = 0.0, s22 = 0.0, r1 = 0.0, r2 = 0.0;
  std::vector<double> y(x.n());
  for (std::size_t k = 0; k < nd; ++k) {
    double ang = 2.0 * pi_const * static_cast<double>(k + 1) / static_cast<double>(nd);
    Vec u = {std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < x.n(); ++i) y[i] = u[0] * x(i, 0) + u[1] * x(i, 1);

    // known projected scale and skew under the frozen shape
    double sa = 0.0, ba = 0.0, cu = 0.0;
    for (const auto& atom : shape.atoms) {
      double w = u[0] * atom.s[0] + u[1] * atom.s[1];
      double aw = std::fabs(w);
      if (aw < 1e-14) continue;
      double pw = std::pow(aw, alpha);
      sa += atom.gamma * pw;
      ba += atom.gamma * (w > 0.0 ? pw : -pw);
      cu += atom.gamma * w * std::log(aw);
    }
    double sigma_u = std::pow(sa, 1.0 / alpha);

    std::vector<double> sorted(y);
    std::sort(sorted.begin(), sorted.end());
    double med = detail::sample_quantile(sorted, 0.5);
    double c = 0.5 * (detail::sample_quantile(sorted, 0.75) - detail::sample_quantile(sorted, 0.25));
    if (!(c > 1e-12)) c = 1e-12;
    std::vector<double> d(x.n());
    for (std::size_t i = 0; i < x.n(); ++i) d[i] = (y[i] - med) / c;

    // single-unknown LS for the centered projected location
    double kappa_d;
    if (near_one) {
      kappa_d = -(2.0 / pi_const) * ba / c;  // coefficient of t ln t, see below
    } else {
      kappa_d = tanpa * ba / std::pow(c, alpha);
    }
    double num = 0.0, den = 0.0;
    double gscale = 1.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      num = den = 0.0;
      int low = 0, high = 0, used = 0;
      for (int kk = 1; kk <= 10; ++kk) {
        double t = 0.1 * kk * gscale;
        detail::EcfPoint pt = detail::ecf_point_1d(d, t);
        if (pt.mod2 <= 0.05) {
          ++low;
          continue;
        }
        if (pt.mod2 >= 0.9999) {
          ++high;
          continue;
        }
        double skewterm = near_one ? kappa_d * t * std::log(t) : kappa_d * std::pow(t, alpha);
        num += t * (pt.arg - skewterm);
        den += t * t;
        ++used;
      }
      if (used >= 4) break;
      gscale *= (high > low) ? 2.0 : 0.5;
    }
    double mu_d = (den > 0.0) ? num / den : 0.0;
    double mu;
    if (near_one) {
      double beta_u = (sa > 0.0) ? ba / sa : 0.0;
      mu = c * mu_d + med - (2.0 / pi_const) * beta_u * sigma_u * std::log(c);
      mu += (2.0 / pi_const) * cu;  // translate to u'xi
    } else {
      mu = c * mu_d + med;  // this is u'xi_tilde
    }
    double target = mu;
    s11 += u[0] * u[0];
    s12 += u[0] * u[1];
    s22 += u[1] * u[1];
    r1 += u[0] * target;
    r2 += u[1] * target;
  }
  double det = s11 * s22 - s12 * s12;
  Vec xi = {(r1 * s22 - r2 * s12) / det, (r2 * s11 - r1 * s12) / det};
  if (!near_one) {
    Vec shift(2, 0.0);
    for (const auto& atom : shape.atoms) {
      shift[0] += atom.gamma * atom.s[0];
      shift[1] += atom.gamma * atom.s[1];
    }
    xi = {xi[0] + tanpa * shift[0], xi[1] + tanpa * shift[1]};
  }
  AsParams par = shape;
  par.xi = xi;
  FitResult out;
  out.params = par;
  out.objective = 0.0;
  out.converged = true;
  out.iterations = 1;
  return out;
}

}  // namespace skewgof
