#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "skewgof/matrix.hpp"
#include "skewgof/sample.hpp"

namespace skewgof {
namespace detail {

// Scale matrices are optimized through their Cholesky factor, stored row by
// row with the diagonal on a log scale so every parameter vector maps to an
// SPD matrix.
inline std::size_t ltri_size(std::size_t p) { return p * (p + 1) / 2; }

inline void pack_ltri(const Matrix& l, double* out) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out[k++] = (i == j) ? std::log(l(i, j)) : l(i, j);
}

inline Matrix unpack_ltri(const double* in, std::size_t p) {
  Matrix l(p, p);
  std::size_t k = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = in[k++];
      l(i, j) = (i == j) ? std::exp(std::clamp(v, -25.0, 25.0)) : v;
    }
  return l;
}

inline Matrix ltri_to_spd(const Matrix& l) {
  const std::size_t p = l.rows();
  Matrix o(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) s += l(i, k) * l(j, k);
      o(i, j) = o(j, i) = s;
    }
  return o;
}

inline double sample_quantile(std::vector<double> v, double prob) {
  if (v.empty()) throw std::invalid_argument("sample_quantile: empty");
  std::sort(v.begin(), v.end());
  double pos = prob * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  double w = pos - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[lo + 1];
}

inline double sample_median(std::vector<double> v) { return sample_quantile(std::move(v), 0.5); }

inline std::vector<double> sample_column(const Sample& x, std::size_t j) {
  std::vector<double> c(x.n());
  for (std::size_t i = 0; i < x.n(); ++i) c[i] = x(i, j);
  return c;
}

// Numeric failures inside an optimization objective mark the point as
// infinitely bad instead of aborting the whole fit.
template <typename F>
auto guard_objective(F f) {
  return [f](const std::vector<double>& t) -> double {
    try {
      return f(t);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
}

}  // namespace detail
}  // namespace skewgof
