#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "skewgof/matrix.hpp"

namespace skewgof {

struct OptimOpts {
  int max_iter = 4000;
  double tol_f = 1e-10;  // simplex function spread, relative to |f_best|
  double tol_x = 1e-9;   // simplex edge length, relative to |x_best|
};

struct OptimResult {
  Vec x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead downhill simplex with the classic coefficients.  Non-finite
// objective values away from the start are treated as +inf so the simplex
// backs off; a non-finite value at the start itself is a caller error.
// The returned point is the best vertex ever seen, which by construction is
// never worse than the start.
template <class F>
OptimResult nelder_mead(F&& f, const Vec& x0, const Vec& steps, OptimOpts opts = {}) {
  const std::size_t d = x0.size();
  if (d == 0) throw std::invalid_argument("nelder_mead: empty start");
  if (steps.size() != d) throw std::invalid_argument("nelder_mead: steps size mismatch");
  const double big = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](const Vec& x) {
    ++evals;
    double v = f(x);
    return std::isfinite(v) ? v : big;
  };

  std::vector<Vec> vx(d + 1, x0);
  Vec vf(d + 1);
  vf[0] = eval(x0);
  if (!std::isfinite(vf[0]))
    throw std::invalid_argument("nelder_mead: objective not finite at the start");
  for (std::size_t i = 0; i < d; ++i) {
    double s = steps[i] != 0.0 ? steps[i] : 1e-4;
    vx[i + 1][i] += s;
    vf[i + 1] = eval(vx[i + 1]);
  }

  std::vector<std::size_t> ord(d + 1);
  auto resort = [&]() {
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return vf[a] < vf[b]; });
  };
  resort();

  OptimResult out;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    std::size_t best = ord[0], worst = ord[d], second = ord[d - 1];
    double spread = vf[worst] - vf[best];
    if (!(spread > opts.tol_f * (1.0 + std::fabs(vf[best])))) {
      out.converged = true;
      break;
    }
    double edge = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      edge = std::max(edge, std::fabs(vx[worst][i] - vx[best][i]));
    double xscale = 0.0;
    for (std::size_t i = 0; i < d; ++i) xscale = std::max(xscale, std::fabs(vx[best][i]));
    if (!(edge > opts.tol_x * (1.0 + xscale))) {
      out.converged = true;
      break;
    }

    Vec centroid(d, 0.0);
    for (std::size_t v = 0; v <= d; ++v) {
      if (v == worst) continue;
      for (std::size_t i = 0; i < d; ++i) centroid[i] += vx[v][i];
    }
    for (std::size_t i = 0; i < d; ++i) centroid[i] /= static_cast<double>(d);

    auto blend = [&](double coef) {
      Vec x(d);
      for (std::size_t i = 0; i < d; ++i)
        x[i] = centroid[i] + coef * (vx[worst][i] - centroid[i]);
      return x;
    };

    Vec xr = blend(-1.0);
    double fr = eval(xr);
    if (fr < vf[best]) {
      Vec xe = blend(-2.0);
      double fe = eval(xe);
      if (fe < fr) {
        vx[worst] = std::move(xe);
        vf[worst] = fe;
      } else {
        vx[worst] = std::move(xr);
        vf[worst] = fr;
      }
    } else if (fr < vf[second]) {
      vx[worst] = std::move(xr);
      vf[worst] = fr;
    } else {
      bool outside = fr < vf[worst];
      Vec xc = blend(outside ? -0.5 : 0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, vf[worst])) {
        vx[worst] = std::move(xc);
        vf[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t v = 0; v <= d; ++v) {
          if (v == best) continue;
          for (std::size_t i = 0; i < d; ++i)
            vx[v][i] = vx[best][i] + 0.5 * (vx[v][i] - vx[best][i]);
          vf[v] = eval(vx[v]);
        }
      }
    }
    resort();
  }
  resort();
  out.x = vx[ord[0]];
  out.f = vf[ord[0]];
  out.iterations = it;
  out.evaluations = evals;
  return out;
}

// One restart from the incumbent often tightens a stalled simplex at small
// cost; used by the family fitters.
template <class F>
OptimResult nelder_mead_restarted(F&& f, const Vec& x0, const Vec& steps, OptimOpts opts = {},
                                  int restarts = 1) {
  OptimResult r = nelder_mead(f, x0, steps, opts);
  for (int k = 0; k < restarts; ++k) {
    Vec small(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) small[i] = 0.1 * (steps[i] != 0.0 ? steps[i] : 1e-4);
    OptimResult r2 = nelder_mead(f, r.x, small, opts);
    r2.evaluations += r.evaluations;
    r2.iterations += r.iterations;
    if (r2.f <= r.f) r = r2;
  }
  return r;
}

}  // namespace skewgof
