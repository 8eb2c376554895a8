#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace skewgof {

// Hierarchical stream identity: a master seed plus a path of indices
// (study / cell / replication / stage ...).  Any two distinct paths give
// statistically independent streams, and the mapping is pure, so every
// replication can be regenerated in isolation.
struct SeedSpec {
  std::uint64_t master = 0;
  std::vector<std::uint64_t> path;

  SeedSpec() = default;
  explicit SeedSpec(std::uint64_t m) : master(m) {}
  SeedSpec(std::uint64_t m, std::vector<std::uint64_t> p) : master(m), path(std::move(p)) {}

  SeedSpec child(std::uint64_t idx) const {
    SeedSpec s(*this);
    s.path.push_back(idx);
    return s;
  }
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace detail

// xoshiro256++ generator keyed by a SeedSpec.  The path is absorbed into a
// 64-bit digest by iterated splitmix64 mixing (length-prefixed, so distinct
// paths cannot collide by extension), then expanded into the 256-bit state.
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& seed) {
    std::uint64_t h = detail::mix64(seed.master);
    h = detail::mix64(h ^ detail::mix64(static_cast<std::uint64_t>(seed.path.size())));
    for (std::uint64_t e : seed.path) h = detail::mix64(h ^ detail::mix64(e + 0x632be59bd9b4e019ULL));
    std::uint64_t sm = h;
    for (auto& si : s_) {
      sm += 0x9e3779b97f4a7c15ULL;
      si = detail::mix64(sm);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // all-zero state is absorbing
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // uniform on the open interval (0,1); safe under log()
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential() { return -std::log(uniform01()); }

  // standard normal via the Marsaglia polar method; second value cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  void normals(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = normal();
  }
  std::vector<double> normals(std::size_t n) {
    std::vector<double> z(n);
    normals(z.data(), n);
    return z;
  }

  // Gamma(shape k, scale theta) by Marsaglia-Tsang; k < 1 boosted through k+1.
  double gamma(double k, double theta) {
    if (!(k > 0.0) || !(theta > 0.0)) throw std::invalid_argument("gamma: shape and scale must be > 0");
    if (k < 1.0) {
      double u = uniform01();
      return gamma(k + 1.0, theta) * std::pow(u, 1.0 / k);
    }
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * theta;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * theta;
    }
  }

  // Inverse gamma IG(a,b): reciprocal of a Gamma(a, 1/b) draw.
  // The mean exists only for a > 1 (see inverse_gamma_heavy_tail).
  double inverse_gamma(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("inverse_gamma: a and b must be > 0");
    return 1.0 / gamma(a, 1.0 / b);
  }
  static bool inverse_gamma_heavy_tail(double a) { return a <= 1.0; }

  // Univariate alpha-stable draw in the 1-parameterization
  // (ch.f. exp(-sigma^alpha |u|^alpha [1 - i beta tan(pi alpha/2) sign u] + i mu u),
  // alpha=1 branch: exp(-sigma|u|[1 + i beta (2/pi) sign(u) ln(sigma|u|)] + i mu u)).
  // Chambers-Mallows-Stuck in Weron's form.
  double stable(double alpha, double beta, double sigma = 1.0, double mu = 0.0) {
    if (!(alpha > 0.0) || alpha > 2.0) throw std::invalid_argument("stable: alpha must be in (0,2]");
    if (beta < -1.0 || beta > 1.0) throw std::invalid_argument("stable: beta must be in [-1,1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("stable: sigma must be > 0");
    const double half_pi = 1.5707963267948966;
    double u = uniform(-half_pi, half_pi);
    double w = exponential();
    if (alpha == 1.0) {
      double a = half_pi + beta * u;
      double z = (a * std::tan(u) - beta * std::log((half_pi * w * std::cos(u)) / a)) / half_pi;
      return sigma * z + mu + (2.0 / 3.141592653589793) * beta * sigma * std::log(sigma);
    }
    double tanpa = (alpha == 2.0) ? 0.0 : std::tan(half_pi * alpha);
    double b0 = std::atan(beta * tanpa) / alpha;
    double s0 = std::pow(1.0 + beta * beta * tanpa * tanpa, 0.5 / alpha);
    double z = s0 * std::sin(alpha * (u + b0)) / std::pow(std::cos(u), 1.0 / alpha) *
               std::pow(std::cos(u - alpha * (u + b0)) / w, (1.0 - alpha) / alpha);
    return sigma * z + mu;
  }

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace skewgof
