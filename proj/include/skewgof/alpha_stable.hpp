#pragma once

#include <cmath>
#include <complex>

#include "skewgof/matrix.hpp"
#include "skewgof/rng.hpp"
#include "skewgof/sample.hpp"
#include "skewgof/special.hpp"

namespace skewgof {

// Multivariate alpha-stable law with a discrete spectral measure: unit-norm
// directions s_i carrying weights gamma_i > 0, common index alpha in (0,2],
// and a location shift xi.  Characteristic function
//   exp( -sum_i gamma_i psi_alpha(t's_i) + i t'xi ),
// psi_alpha as in psi_stable below.
struct AsAtom {
  Vec s;
  double gamma = 0.0;
};

struct AsParams {
  Vec xi;
  std::vector<AsAtom> atoms;
  double alpha = 2.0;

  std::size_t p() const { return xi.size(); }

  void validate() const {
    if (xi.empty() || atoms.empty())
      throw std::invalid_argument("AsParams: need a location and at least one atom");
    if (!(alpha > 0.0) || alpha > 2.0)
      throw std::invalid_argument("AsParams: alpha must be in (0,2]");
    if (!all_finite(xi)) throw std::invalid_argument("AsParams: non-finite location");
    for (const auto& a : atoms) {
      if (a.s.size() != p() || !all_finite(a.s))
        throw std::invalid_argument("AsParams: atom direction malformed");
      if (std::fabs(norm2(a.s) - 1.0) > 1e-12)
        throw std::invalid_argument("AsParams: atom directions must have unit norm");
      if (!(a.gamma > 0.0) || !std::isfinite(a.gamma))
        throw std::invalid_argument("AsParams: atom weights must be positive");
    }
  }
};

// psi_alpha(u): exponent kernel of a one-dimensional projection.
//   alpha != 1:  |u|^alpha (1 + i sign(u) tan(pi alpha/2) (|u|^{1-alpha} - 1))
//   alpha == 1:  |u| (1 + i sign(u) (2/pi) ln|u|)
//   alpha == 2 reduces to u^2.
inline std::complex<double> psi_stable(double alpha, double u) {
  if (u == 0.0) return {0.0, 0.0};
  double au = std::fabs(u);
  double sg = u > 0.0 ? 1.0 : -1.0;
  if (alpha == 1.0) return {au, au * sg * (2.0 / pi_const) * std::log(au)};
  double tanpa = (alpha == 2.0) ? 0.0 : std::tan(0.5 * pi_const * alpha);
  double mod = std::pow(au, alpha);
  return {mod, mod * sg * tanpa * (std::pow(au, 1.0 - alpha) - 1.0)};
}

inline std::complex<double> cf_as(const AsParams& par, const Vec& t) {
  par.validate();
  if (t.size() != par.p()) throw std::invalid_argument("cf_as: dimension mismatch");
  std::complex<double> expo(0.0, dot(t, par.xi));
  for (const auto& a : par.atoms) expo -= a.gamma * psi_stable(par.alpha, dot(t, a.s));
  return std::exp(expo);
}

// Generation (exact for a discrete spectral measure): independent totally
// skewed standard stable draws Z_i ~ S_alpha(beta=1, sigma=1, mu=0) along each
// atom direction,
//   alpha != 1:  X = sum_i gamma_i^{1/alpha} Z_i s_i + xi - tan(pi alpha/2) sum_i gamma_i s_i
//   alpha == 1:  X = sum_i gamma_i (Z_i + (2/pi) ln gamma_i) s_i + xi
// (at alpha = 1 the tan correction is replaced by the logarithmic one inside
// the sum and the location needs no shift).  Atoms are consumed in index
// order within each row.
inline Sample sample_as(const AsParams& par, std::size_t n, RandomStream& stream) {
  par.validate();
  const std::size_t p = par.p();
  const double alpha = par.alpha;
  Vec shift(par.xi);
  if (alpha != 1.0) {
    double tanpa = (alpha == 2.0) ? 0.0 : std::tan(0.5 * pi_const * alpha);
    for (const auto& a : par.atoms)
      for (std::size_t j = 0; j < p; ++j) shift[j] -= tanpa * a.gamma * a.s[j];
  }
  std::vector<double> wcoef(par.atoms.size());
  std::vector<double> wadd(par.atoms.size(), 0.0);
  for (std::size_t i = 0; i < par.atoms.size(); ++i) {
    if (alpha == 1.0) {
      wcoef[i] = par.atoms[i].gamma;
      wadd[i] = (2.0 / pi_const) * std::log(par.atoms[i].gamma);
    } else {
      wcoef[i] = std::pow(par.atoms[i].gamma, 1.0 / alpha);
    }
  }
  Sample out(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) out(r, j) = shift[j];
    for (std::size_t i = 0; i < par.atoms.size(); ++i) {
      double z = stream.stable(alpha, 1.0);
      double c = (alpha == 1.0) ? wcoef[i] * (z + wadd[i]) : wcoef[i] * z;
      for (std::size_t j = 0; j < p; ++j) out(r, j) += c * par.atoms[i].s[j];
    }
  }
  return out;
}

// Spectral measure concentrated on q equally spaced directions of the unit
// circle, s_k = (cos(2 pi k / q), sin(2 pi k / q)) for k = 1..q, total mass 1.
inline AsParams regular_polygon_measure(std::size_t q, double alpha, double total_mass = 1.0) {
  if (q == 0) throw std::invalid_argument("regular_polygon_measure: q must be >= 1");
  AsParams par;
  par.xi = Vec(2, 0.0);
  par.alpha = alpha;
  par.atoms.resize(q);
  for (std::size_t k = 1; k <= q; ++k) {
    double ang = 2.0 * pi_const * static_cast<double>(k) / static_cast<double>(q);
    par.atoms[k - 1].s = {std::cos(ang), std::sin(ang)};
    par.atoms[k - 1].gamma = total_mass / static_cast<double>(q);
  }
  return par;
}

}  // namespace skewgof
