#pragma once

#include <cmath>

#include "skewgof/matrix.hpp"
#include "skewgof/rng.hpp"
#include "skewgof/sample.hpp"

namespace skewgof {

// Componentwise sinh-arcsinh transformed normal, used as an alternative in
// power experiments: Y_j = sinh( (asinh(Z_j) + e_j) / f_j )... see sample_sas
// for the exact orientation of the parameters.
struct SasParams {
  Vec e;  // skewness deformation, 0 = symmetric
  Vec f;  // tail weight, 1 = normal tails

  std::size_t p() const { return e.size(); }

  void validate() const {
    if (e.empty() || f.size() != e.size())
      throw std::invalid_argument("SasParams: inconsistent dimensions");
    if (!all_finite(e) || !all_finite(f)) throw std::invalid_argument("SasParams: non-finite entries");
    for (double v : f)
      if (!(v > 0.0)) throw std::invalid_argument("SasParams: f must be > 0 componentwise");
  }
};

// S_{a,b}(z) = sinh(b asinh(z) - a) applied per coordinate with
// a_j = -e_j / f_j and b_j = 1 / f_j; e = 0, f = 1 is the identity.
inline Sample sample_sas(const SasParams& par, std::size_t n, RandomStream& stream) {
  par.validate();
  const std::size_t p = par.p();
  Sample out(n, p);
  Vec z(p);
  for (std::size_t i = 0; i < n; ++i) {
    stream.normals(z.data(), p);
    for (std::size_t j = 0; j < p; ++j) {
      double a = -par.e[j] / par.f[j];
      double b = 1.0 / par.f[j];
      out(i, j) = std::sinh(b * std::asinh(z[j]) - a);
    }
  }
  return out;
}

}  // namespace skewgof
