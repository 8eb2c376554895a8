#pragma once

#include <cmath>
#include <stdexcept>

#include "skewgof/errors.hpp"

namespace skewgof {

inline constexpr double pi_const = 3.141592653589793238462643383279502884;

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi_const); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double log_norm_cdf(double x) {
  if (x > -36.0) {
    double p = norm_cdf(x);
    if (p > 0.0) return std::log(p);
  }
  // asymptotic tail expansion of Mills ratio
  double x2 = x * x;
  double corr = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * pi_const) + std::log1p(corr);
}

// Inverse standard normal CDF: Acklam's rational approximation polished by
// one Halley step against erfc, giving near machine precision.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("norm_quantile: p must be in (0,1)");
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = norm_cdf(x) - p;
  double u = e * std::sqrt(2.0 * pi_const) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK nodes).
template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
  static const double xgk[8] = {0.991455371120812639206854697526329,
                                0.949107912342758524526189684047851,
                                0.864864423359769072789712788640926,
                                0.741531185599394439863864773280788,
                                0.586087235467691130294144838258730,
                                0.405845151377397166906606412076961,
                                0.207784955007898467600689403773245,
                                0.000000000000000000000000000000000};
  static const double wgk[8] = {0.022935322010529224963732008058970,
                                0.063092092629978553290700663189204,
                                0.104790010322250183839876322541518,
                                0.140653259715525918745189590510238,
                                0.169004726639267902826583426598550,
                                0.190350578064785409913256402421014,
                                0.204432940075298892414161999234649,
                                0.209482141084727828012999174891714};
  static const double wg[4] = {0.129484966168869693270611432679082,
                               0.279705391489276667901467771423780,
                               0.381830050505118944950369775488975,
                               0.417959183673469387755102040816327};
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fc = f(center);
  double res_g = fc * wg[3];
  double res_k = fc * wgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = half * xgk[j];
    double fsum = f(center - x) + f(center + x);
    res_k += wgk[j] * fsum;
    if (j % 2 == 1) res_g += wg[j / 2] * fsum;
  }
  value = res_k * half;
  err = std::fabs((res_k - res_g) * half);
}

template <class F>
inline double adaptive_gk(const F& f, double a, double b, double abstol, double reltol,
                          int depth = 0) {
  double v, e;
  gk15(f, a, b, v, e);
  if (e <= abstol || e <= reltol * std::fabs(v) || depth >= 40) {
    if (depth >= 40 && !(e <= 1e3 * (abstol + reltol * std::fabs(v))))
      throw numeric_error("adaptive quadrature: refinement limit hit");
    return v;
  }
  double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * abstol, reltol, depth + 1) +
         adaptive_gk(f, mid, b, 0.5 * abstol, reltol, depth + 1);
}

}  // namespace detail

template <class F>
inline double integrate(const F& f, double a, double b, double abstol = 1e-12,
                        double reltol = 1e-12) {
  if (a == b) return 0.0;
  return detail::adaptive_gk(f, a, b, abstol, reltol);
}

// tau(x) = sqrt(2/pi) * Int_0^x exp(u^2/2) du  (odd in x).
// Appears in the skew-normal characteristic function.  Moderate arguments go
// through adaptive quadrature; large ones through the asymptotic expansion
// exp(x^2/2)/x * (1 + 1/x^2 + 3/x^4 + ...), which is what log_tau_cf encodes.
inline double tau_cf(double x) {
  if (x == 0.0) return 0.0;
  double ax = std::fabs(x);
  double s = x > 0.0 ? 1.0 : -1.0;
  if (ax <= 30.0) {
    double v = integrate([](double u) { return std::exp(0.5 * u * u); }, 0.0, ax, 1e-13, 1e-13);
    return s * std::sqrt(2.0 / pi_const) * v;
  }
  double x2 = ax * ax;
  double series = 1.0 + 1.0 / x2 + 3.0 / (x2 * x2) + 15.0 / (x2 * x2 * x2) +
                  105.0 / (x2 * x2 * x2 * x2);
  return s * std::sqrt(2.0 / pi_const) * std::exp(0.5 * x2) / ax * series;
}

// log of tau_cf for x >= 30, where tau itself would overflow.
inline double log_tau_cf(double x) {
  if (!(x >= 30.0)) throw std::invalid_argument("log_tau_cf: requires x >= 30");
  double x2 = x * x;
  double series = 1.0 / x2 + 3.0 / (x2 * x2) + 15.0 / (x2 * x2 * x2);
  return 0.5 * std::log(2.0 / pi_const) + 0.5 * x2 - std::log(x) + std::log1p(series);
}

namespace detail {
inline double betacf(double a, double b, double x) {
  const double fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-14) return h;
  }
  throw numeric_error("betacf: continued fraction did not converge");
}
}  // namespace detail

// Regularized incomplete beta function I_x(a,b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("reg_inc_beta: a,b must be > 0");
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("reg_inc_beta: x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
               b * std::log1p(-x);
  double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail::betacf(a, b, x) / a;
  return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// CDF of Student's t with nu degrees of freedom; normal limit past nu = 1e7.
inline double student_t_cdf(double t, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("student_t_cdf: nu must be > 0");
  if (nu > 1e7) return norm_cdf(t);
  if (t == 0.0) return 0.5;
  double x = nu / (nu + t * t);
  double p = 0.5 * reg_inc_beta(0.5 * nu, 0.5, x);
  return t > 0.0 ? 1.0 - p : p;
}

}  // namespace skewgof
