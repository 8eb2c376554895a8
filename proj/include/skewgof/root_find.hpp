#pragma once

#include <cmath>
#include <limits>

#include "skewgof/errors.hpp"

namespace skewgof {

// Root of f(z) = target for strictly increasing f.  Brackets by geometric
// expansion around z0, then runs Newton (when a derivative is supplied) or
// secant steps, each safeguarded by the bracket; falls back to bisection
// whenever a step misbehaves.  Stops once |f(z) - target| <= tol * max(1,|target|)
// or the bracket collapses to rounding width.
template <class F, class DF>
inline double find_root_increasing(const F& f, const DF& df, double target, double tol = 1e-10,
                                   double z0 = 0.0, double step0 = 1.0, bool use_df = true) {
  if (!std::isfinite(target)) throw std::invalid_argument("find_root_increasing: target not finite");
  double s = std::fabs(step0) > 0.0 ? std::fabs(step0) : 1.0;
  double lo = z0 - s, hi = z0 + s;
  double flo = f(lo), fhi = f(hi);
  // expand the failing side geometrically; monotonicity keeps the invariant
  // f(lo) <= target <= f(hi) once both loops finish
  int guard = 0;
  while (!(flo <= target)) {
    if (++guard > 200) throw numeric_error("find_root_increasing: could not bracket target from below");
    hi = lo;
    fhi = flo;
    s *= 2.0;
    lo -= s;
    flo = f(lo);
  }
  guard = 0;
  while (!(fhi >= target)) {
    if (++guard > 200) throw numeric_error("find_root_increasing: could not bracket target from above");
    lo = hi;
    flo = fhi;
    s *= 2.0;
    hi += s;
    fhi = f(hi);
  }

  double z = 0.5 * (lo + hi);
  double prev_z = lo, prev_f = flo;
  for (int it = 0; it < 200; ++it) {
    double fz = f(z);
    if (std::isfinite(fz) && std::fabs(fz - target) <= tol * std::fmax(1.0, std::fabs(target)))
      return z;
    if (fz < target) {
      lo = z;
      flo = fz;
    } else {
      hi = z;
      fhi = fz;
    }
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() *
                       std::fmax(1.0, std::fmax(std::fabs(lo), std::fabs(hi))))
      return 0.5 * (lo + hi);
    double cand = std::numeric_limits<double>::quiet_NaN();
    if (use_df) {
      double d = df(z);
      if (std::isfinite(d) && d > 0.0) cand = z - (fz - target) / d;
    }
    if (!std::isfinite(cand) && std::isfinite(fz) && std::isfinite(prev_f) && fz != prev_f) {
      cand = z - (fz - target) * (z - prev_z) / (fz - prev_f);  // secant
    }
    prev_z = z;
    prev_f = fz;
    if (!std::isfinite(cand) || cand <= lo || cand >= hi) cand = 0.5 * (lo + hi);
    z = cand;
  }
  throw numeric_error("find_root_increasing: iteration limit reached");
}

template <class F>
inline double find_root_increasing(const F& f, double target, double tol = 1e-10, double z0 = 0.0,
                                   double step0 = 1.0) {
  auto no_df = [](double) { return 0.0; };
  return find_root_increasing(f, no_df, target, tol, z0, step0, /*use_df=*/false);
}

}  // namespace skewgof
