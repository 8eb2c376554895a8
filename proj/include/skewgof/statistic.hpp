#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "skewgof/kernels.hpp"
#include "skewgof/matrix.hpp"
#include "skewgof/parallel.hpp"
#include "skewgof/rng.hpp"
#include "skewgof/sample.hpp"
#include "skewgof/special.hpp"

namespace skewgof {

inline std::complex<double> ecf(const Sample& x, const Vec& t) {
  if (t.size() != x.p()) throw std::invalid_argument("ecf: argument dimension mismatch");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) {
    const double* r = x.row(i);
    double a = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) a += t[j] * r[j];
    re += std::cos(a);
    im += std::sin(a);
  }
  double n = static_cast<double>(x.n());
  return {re / n, im / n};
}

struct StatValue {
  double value = 0.0;
  std::size_t n = 0, m = 0;
};

namespace detail {

// Kernel values are quantized once onto a 2^-52 grid and accumulated in
// 128-bit integers.  Addition is then exact and order-free, which makes the
// statistic bit-identical under row permutations and any worker count; the
// quantization perturbs each term by at most 2^-53, far below the noise floor
// of everything downstream.
inline constexpr double quantum = 4503599627370496.0;  // 2^52

inline unsigned __int128 qkernel(const KernelSpec& k, double xi) {
  return static_cast<unsigned __int128>(static_cast<std::uint64_t>(
      std::llround(kernel_eval(k, xi) * quantum)));
}

inline double sqdist(const double* a, const double* b, std::size_t p) {
  double s = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

// sum of quantized Psi over unordered pairs j < k within one sample
inline unsigned __int128 pair_sum_within(const Sample& x, const KernelSpec& k, unsigned threads) {
  const std::size_t n = x.n(), p = x.p();
  if (n < 2) return 0;
  unsigned w = effective_threads(threads);
  std::size_t blocks = (w <= 1) ? 1 : std::min<std::size_t>(n, 4 * w);
  std::vector<unsigned __int128> part(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    unsigned __int128 acc = 0;
    for (std::size_t j = blk; j < n; j += blocks) {
      const double* rj = x.row(j);
      for (std::size_t l = j + 1; l < n; ++l) acc += qkernel(k, sqdist(rj, x.row(l), p));
    }
    part[blk] = acc;
  });
  unsigned __int128 total = 0;
  for (auto v : part) total += v;
  return total;
}

inline unsigned __int128 pair_sum_cross(const Sample& x, const Sample& y, const KernelSpec& k,
                                        unsigned threads) {
  const std::size_t n = x.n(), m = y.n(), p = x.p();
  unsigned w = effective_threads(threads);
  std::size_t blocks = (w <= 1) ? 1 : std::min<std::size_t>(n, 4 * w);
  std::vector<unsigned __int128> part(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    unsigned __int128 acc = 0;
    for (std::size_t j = blk; j < n; j += blocks) {
      const double* rj = x.row(j);
      for (std::size_t l = 0; l < m; ++l) acc += qkernel(k, sqdist(rj, y.row(l), p));
    }
    part[blk] = acc;
  });
  unsigned __int128 total = 0;
  for (auto v : part) total += v;
  return total;
}

inline long double to_ld(unsigned __int128 v) {
  return static_cast<long double>(static_cast<std::uint64_t>(v >> 64)) * 18446744073709551616.0L +
         static_cast<long double>(static_cast<std::uint64_t>(v));
}

}  // namespace detail

// Weighted-L2 ECF distance between sample x (data) and sample x0 (null draw):
//   (1/n^2) sum_jk Psi(|xj-xk|^2) + (1/m^2) sum_jk Psi(|x0j-x0k|^2)
//   - (2/nm) sum_jl Psi(|xj-x0l|^2).
// Large values indicate the empirical CFs disagree after weighting.
inline StatValue t_stat(const Sample& x, const Sample& x0, const KernelSpec& kernel,
                        unsigned threads = 1) {
  if (x.n() == 0 || x0.n() == 0) throw std::invalid_argument("t_stat: empty sample");
  if (x.p() != x0.p()) throw std::invalid_argument("t_stat: dimension mismatch");
  if (!x.finite() || !x0.finite()) throw std::invalid_argument("t_stat: non-finite entries");
  const std::size_t n = x.n(), m = x0.n();
  unsigned __int128 wx = detail::pair_sum_within(x, kernel, threads);
  unsigned __int128 wy = detail::pair_sum_within(x0, kernel, threads);
  unsigned __int128 cr = detail::pair_sum_cross(x, x0, kernel, threads);
  // diagonal terms contribute Psi(0) = 1 exactly, i.e. n (resp. m) quanta
  const long double q = static_cast<long double>(detail::quantum);
  long double sx = (2.0L * detail::to_ld(wx) + static_cast<long double>(n) * q);
  long double sy = (2.0L * detail::to_ld(wy) + static_cast<long double>(m) * q);
  long double sc = detail::to_ld(cr);
  long double nn = static_cast<long double>(n), mm = static_cast<long double>(m);
  long double t = sx / (q * nn * nn) + sy / (q * mm * mm) - 2.0L * sc / (q * nn * mm);
  StatValue out;
  out.value = static_cast<double>(t);
  out.n = n;
  out.m = m;
  return out;
}

struct OracleEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

// Monte Carlo twin of t_stat: the statistic equals the expectation of
// |ecf_x(W) - ecf_x0(W)|^2 with W drawn from the kernel's spectral measure
// (standard normal for gaussian; subordinated normals for the others).
// Used as an independent oracle for t_stat, never in the test pipeline.
inline OracleEstimate mc_oracle(const Sample& x, const Sample& x0, const KernelSpec& kernel,
                                std::size_t draws, const SeedSpec& seed, unsigned threads = 1) {
  if (x.p() != x0.p()) throw std::invalid_argument("mc_oracle: dimension mismatch");
  if (draws == 0) throw std::invalid_argument("mc_oracle: need draws >= 1");
  const std::size_t p = x.p();
  const std::size_t block = 65536;
  const std::size_t nblocks = (draws + block - 1) / block;
  // g in [0,4] quantized at 2^50, g^2 in [0,16] at 2^48: both stay below 2^52
  // per draw, so 2^128 accommodates any realistic draw count exactly.
  const double q1 = 1125899906842624.0;   // 2^50
  const double q2 = 281474976710656.0;    // 2^48
  std::vector<unsigned __int128> s1(nblocks, 0), s2(nblocks, 0);
  parallel_for(nblocks, threads, [&](std::size_t blk) {
    RandomStream stream(seed.child(blk));
    std::size_t lo = blk * block;
    std::size_t hi = std::min(draws, lo + block);
    unsigned __int128 a1 = 0, a2 = 0;
    Vec w(p);
    for (std::size_t d = lo; d < hi; ++d) {
      stream.normals(w.data(), p);
      double scale = 1.0;
      switch (kernel.kind) {
        case KernelSpec::Kind::gaussian:
          break;
        case KernelSpec::Kind::stable_index: {
          // positive stable subordinator with Laplace transform exp(-s^(b/2))
          double rho = 0.5 * kernel.b;
          double a = stream.stable(rho, 1.0, std::pow(std::cos(0.5 * pi_const * rho), 1.0 / rho), 0.0);
          scale = std::sqrt(2.0 * a);
          break;
        }
        case KernelSpec::Kind::gen_laplace: {
          double v = stream.gamma(kernel.b, 1.0);
          scale = std::sqrt(2.0 * v);
          break;
        }
      }
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < x.n(); ++i) {
        const double* r = x.row(i);
        double ang = 0.0;
        for (std::size_t j = 0; j < p; ++j) ang += scale * w[j] * r[j];
        re += std::cos(ang);
        im += std::sin(ang);
      }
      re /= static_cast<double>(x.n());
      im /= static_cast<double>(x.n());
      double re0 = 0.0, im0 = 0.0;
      for (std::size_t i = 0; i < x0.n(); ++i) {
        const double* r = x0.row(i);
        double ang = 0.0;
        for (std::size_t j = 0; j < p; ++j) ang += scale * w[j] * r[j];
        re0 += std::cos(ang);
        im0 += std::sin(ang);
      }
      re0 /= static_cast<double>(x0.n());
      im0 /= static_cast<double>(x0.n());
      double g = (re - re0) * (re - re0) + (im - im0) * (im - im0);
      a1 += static_cast<std::uint64_t>(std::llround(g * q1));
      a2 += static_cast<std::uint64_t>(std::llround(g * g * q2));
    }
    s1[blk] = a1;
    s2[blk] = a2;
  });
  unsigned __int128 t1 = 0, t2 = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    t1 += s1[b];
    t2 += s2[b];
  }
  long double d = static_cast<long double>(draws);
  long double mean = detail::to_ld(t1) / (static_cast<long double>(q1) * d);
  long double mean2 = detail::to_ld(t2) / (static_cast<long double>(q2) * d);
  long double var = mean2 - mean * mean;
  if (var < 0.0L) var = 0.0L;
  OracleEstimate out;
  out.estimate = static_cast<double>(mean);
  out.std_error = draws > 1 ? static_cast<double>(std::sqrt(static_cast<double>(var) /
                                                            static_cast<double>(draws - 1)))
                            : 0.0;
  out.draws = draws;
  return out;
}

}  // namespace skewgof
