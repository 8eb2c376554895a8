#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "skewgof/family.hpp"
#include "skewgof/special.hpp"

using namespace skewgof;

namespace {

struct Moments {
  Vec mean;
  Matrix cov;
};

Moments sample_moments(const Sample& x) {
  Moments m{x.column_mean(), x.covariance()};
  return m;
}

Matrix identity2() { return Matrix::identity(2); }

}  // namespace

// --- skew-normal ---

TEST_CASE("skew-normal sample mean matches the delta formula") {
  SnParams par{{0.0, 0.0}, identity2(), {3.0, 0.0}};
  RandomStream g(SeedSpec(3001));
  Sample x = sample_sn(par, 200000, g);
  Moments m = sample_moments(x);
  double d1 = 3.0 / std::sqrt(10.0);
  REQUIRE(m.mean[0] == Catch::Approx(std::sqrt(2.0 / pi_const) * d1).margin(0.01));
  REQUIRE(m.mean[1] == Catch::Approx(0.0).margin(0.01));
  // var of the skewed margin: 1 - (2/pi) d1^2
  REQUIRE(m.cov(0, 0) == Catch::Approx(1.0 - (2.0 / pi_const) * d1 * d1).margin(0.01));
  REQUIRE(m.cov(1, 1) == Catch::Approx(1.0).margin(0.015));
}

TEST_CASE("skew-normal density integrates to one and matches the sampler") {
  SnParams par{{0.3}, Matrix::diag({1.44}), {2.0}};
  double mass = integrate([&](double y) { return std::exp(sn_logpdf(par, {y})); }, -9.0, 11.0);
  REQUIRE(mass == Catch::Approx(1.0).margin(1e-8));

  double p_left = integrate([&](double y) { return std::exp(sn_logpdf(par, {y})); }, -9.0, 0.5);
  RandomStream g(SeedSpec(3002));
  Sample x = sample_sn(par, 200000, g);
  double hits = 0;
  for (std::size_t i = 0; i < x.n(); ++i) hits += x(i, 0) <= 0.5;
  REQUIRE(hits / static_cast<double>(x.n()) == Catch::Approx(p_left).margin(0.006));
}

TEST_CASE("skew-normal cf reduces to the gaussian cf at zero slant") {
  SnParams par{{0.5, -0.2}, identity2(), {0.0, 0.0}};
  Vec t = {0.7, -0.4};
  std::complex<double> got = cf_sn(par, t);
  double q = 0.7 * 0.7 + 0.4 * 0.4;
  double phase = 0.7 * 0.5 + (-0.4) * (-0.2);
  std::complex<double> want = std::exp(std::complex<double>(-0.5 * q, phase));
  REQUIRE(std::abs(got - want) < 1e-12);
  REQUIRE(std::abs(cf_sn(par, {0.0, 0.0}) - 1.0) < 1e-15);
}

// --- skew-t ---

TEST_CASE("skew-t sample mean matches the closed form at nu = 5") {
  StParams par{{0.0, 0.0}, identity2(), {3.0, 0.0}, 5.0};
  RandomStream g(SeedSpec(3003));
  Sample x = sample_st(par, 200000, g);
  Moments m = sample_moments(x);
  double d1 = 3.0 / std::sqrt(10.0);
  double b5 = std::sqrt(5.0 / pi_const) * std::tgamma(2.0) / std::tgamma(2.5);
  REQUIRE(m.mean[0] == Catch::Approx(b5 * d1).margin(0.015));
  REQUIRE(m.mean[1] == Catch::Approx(0.0).margin(0.015));
  // unskewed margin has variance nu/(nu-2)
  REQUIRE(m.cov(1, 1) == Catch::Approx(5.0 / 3.0).epsilon(0.05));
}

TEST_CASE("skew-t at a huge nu behaves like the skew-normal") {
  StParams par{{0.0, 0.0}, identity2(), {3.0, 0.0}, st_nu_normal_limit};
  RandomStream g(SeedSpec(3004));
  Sample x = sample_st(par, 100000, g);
  double d1 = 3.0 / std::sqrt(10.0);
  REQUIRE(x.column_mean()[0] ==
          Catch::Approx(std::sqrt(2.0 / pi_const) * d1).margin(0.015));
}

TEST_CASE("skew-t density integrates to one") {
  StParams par{{0.0}, Matrix::diag({1.0}), {2.0}, 4.0};
  double mass = integrate([&](double y) { return std::exp(st_logpdf(par, {y})); }, -500.0, 500.0,
                          1e-10, 1e-10);
  REQUIRE(mass == Catch::Approx(1.0).margin(1e-4));
}

// --- skew-laplace ---

TEST_CASE("skew-laplace mean and covariance match the mixture formulas") {
  // X = xi + W alpha + sqrt(W) L Z with W gamma((p+1)/2, scale 2):
  // E X = xi + (p+1) alpha, cov = 2(p+1) alpha alpha' + (p+1) Omega
  SlParams par{{1.0, -1.0}, identity2(), {0.5, -0.25}};
  RandomStream g(SeedSpec(3005));
  Sample x = sample_sl(par, 200000, g);
  Moments m = sample_moments(x);
  REQUIRE(m.mean[0] == Catch::Approx(1.0 + 3.0 * 0.5).margin(0.03));
  REQUIRE(m.mean[1] == Catch::Approx(-1.0 - 3.0 * 0.25).margin(0.03));
  REQUIRE(m.cov(0, 0) == Catch::Approx(6.0 * 0.25 + 3.0).epsilon(0.05));
  REQUIRE(m.cov(1, 1) == Catch::Approx(6.0 * 0.0625 + 3.0).epsilon(0.05));
  REQUIRE(m.cov(0, 1) == Catch::Approx(6.0 * 0.5 * -0.25).margin(0.08));
}

TEST_CASE("skew-laplace cf equals the stated closed form") {
  SlParams par{{0.2, 0.4}, identity2(), {0.8, -0.3}};
  par.omega(0, 1) = par.omega(1, 0) = 0.3;
  for (Vec t : {Vec{0.5, -0.2}, Vec{1.1, 0.7}, Vec{-0.4, -0.9}}) {
    double tot = dot(t, matvec(par.omega, t));
    double ta = dot(t, par.alpha);
    double phase = dot(t, par.xi);
    std::complex<double> denom(1.0 + tot, -2.0 * ta);
    std::complex<double> want =
        std::exp(std::complex<double>(0.0, phase)) / std::pow(denom, 1.5);
    REQUIRE(std::abs(cf_sl(par, t) - want) < 1e-12);
  }
}

TEST_CASE("skew-laplace density integrates to one and matches the sampler") {
  SlParams par{{0.3}, Matrix::diag({1.44}), {0.8}};
  double mass = integrate([&](double y) { return std::exp(sl_logpdf(par, {y})); }, -60.0, 90.0,
                          1e-10, 1e-10);
  REQUIRE(mass == Catch::Approx(1.0).margin(1e-6));

  double p_left = integrate([&](double y) { return std::exp(sl_logpdf(par, {y})); }, -60.0, 1.0,
                            1e-10, 1e-10);
  RandomStream g(SeedSpec(3006));
  Sample x = sample_sl(par, 200000, g);
  double hits = 0;
  for (std::size_t i = 0; i < x.n(); ++i) hits += x(i, 0) <= 1.0;
  REQUIRE(hits / static_cast<double>(x.n()) == Catch::Approx(p_left).margin(0.006));
}

TEST_CASE("conditional mixing moments solve the posterior integrals") {
  // W | x is generalized inverse gaussian with index 1/2, so
  // E[W|x] = sqrt(q/(1+a)) + 1/(1+a) and E[1/W|x] = sqrt((1+a)/q)
  for (double q : {0.5, 2.0, 7.0}) {
    for (double a : {0.0, 1.5, 4.0}) {
      SlCondMoments m = sl_cond_moments(q, a);
      auto unnorm = [&](double w) {
        return std::pow(w, 0.5 - 1.0) * std::exp(-0.5 * (q / w + (1.0 + a) * w));
      };
      double z0 = integrate(unnorm, 1e-9, 400.0, 1e-12, 1e-12);
      double z1 = integrate([&](double w) { return w * unnorm(w); }, 1e-9, 400.0, 1e-12, 1e-12);
      double zm1 = integrate([&](double w) { return unnorm(w) / w; }, 1e-9, 400.0, 1e-12, 1e-12);
      REQUIRE(m.ew == Catch::Approx(z1 / z0).epsilon(1e-6));
      REQUIRE(m.ewinv == Catch::Approx(zm1 / z0).epsilon(1e-6));
    }
  }
}

// --- tukey g-and-h ---

TEST_CASE("quantile transform is strictly increasing and invertible") {
  for (double gpar : {-2.0, -0.75, 0.0, 0.5, 2.0}) {
    for (double h : {0.0, 0.3, 1.0}) {
      double prev = tau_gh(gpar, h, -5.0);
      for (double z = -4.75; z <= 5.0; z += 0.25) {
        double v = tau_gh(gpar, h, z);
        REQUIRE(v > prev);
        prev = v;
      }
      for (double z : {-4.0, -1.3, 0.0, 0.7, 3.9}) {
        REQUIRE(tau_gh_inv(gpar, h, tau_gh(gpar, h, z)) == Catch::Approx(z).margin(1e-9));
      }
    }
  }
}

TEST_CASE("quantile transform derivative matches central differences") {
  for (double gpar : {-1.0, 0.0, 0.8}) {
    for (double h : {0.0, 0.4}) {
      for (double z : {-2.0, -0.3, 0.0, 1.7}) {
        double eps = 1e-6;
        double num = (tau_gh(gpar, h, z + eps) - tau_gh(gpar, h, z - eps)) / (2.0 * eps);
        REQUIRE(tau_gh_prime(gpar, h, z) == Catch::Approx(num).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("transformed-normal sample mean matches the lognormal-type formula") {
  // E tau(Z) = (1/g) (exp(g^2/(2(1-h))) - 1) / sqrt(1-h) for h < 1
  GhParams par{{0.0, 0.0}, identity2(), {0.5, -0.3}, {0.2, 0.1}};
  par.omega(0, 1) = 0.5;  // general matrix scale mixes the coordinates
  RandomStream g(SeedSpec(3007));
  Sample x = sample_gh(par, 200000, g);
  auto etau = [](double gg, double hh) {
    return (std::exp(gg * gg / (2.0 * (1.0 - hh))) - 1.0) / (gg * std::sqrt(1.0 - hh));
  };
  double e1 = etau(0.5, 0.2), e2 = etau(-0.3, 0.1);
  Vec mean = x.column_mean();
  REQUIRE(mean[0] == Catch::Approx(e1 + 0.5 * e2).margin(0.03));
  REQUIRE(mean[1] == Catch::Approx(e2).margin(0.02));
}

TEST_CASE("transformed-normal density integrates to one with unit mean factor") {
  GhParams par{{0.0}, Matrix::diag({1.0}), {0.5}, {0.2}};
  auto pdf = [&](double y) {
    Sample row(1, 1);
    row(0, 0) = y;
    return std::exp(gh_loglik(par, row));
  };
  double lo = tau_gh(0.5, 0.2, -7.0), hi = tau_gh(0.5, 0.2, 7.0);
  double mass = integrate(pdf, lo, hi, 1e-10, 1e-10);
  REQUIRE(mass == Catch::Approx(1.0).margin(1e-5));
  double mean = integrate([&](double y) { return y * pdf(y); }, lo, hi, 1e-10, 1e-10);
  double want = (std::exp(0.25 / 1.6) - 1.0) / (0.5 * std::sqrt(0.8));
  REQUIRE(mean == Catch::Approx(want).margin(1e-4));
}

// --- asymmetric stable ---

TEST_CASE("stable law at index two is the exact gaussian") {
  AsParams par;
  par.xi = {0.3, -0.7};
  par.alpha = 2.0;
  par.atoms = {{{1.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}};
  RandomStream g(SeedSpec(3008));
  Sample x = sample_as(par, 200000, g);
  Moments m = sample_moments(x);
  REQUIRE(m.mean[0] == Catch::Approx(0.3).margin(0.012));
  REQUIRE(m.mean[1] == Catch::Approx(-0.7).margin(0.012));
  REQUIRE(m.cov(0, 0) == Catch::Approx(1.0).epsilon(0.02));
  REQUIRE(m.cov(1, 1) == Catch::Approx(1.0).epsilon(0.02));
  REQUIRE(m.cov(0, 1) == Catch::Approx(0.0).margin(0.01));
  double hits = 0;
  for (std::size_t i = 0; i < x.n(); ++i) hits += x(i, 0) <= 0.0;
  REQUIRE(hits / static_cast<double>(x.n()) == Catch::Approx(norm_cdf(-0.3)).margin(0.006));
}

TEST_CASE("stable cf at index two equals the gaussian cf") {
  AsParams par;
  par.xi = {0.3, -0.7};
  par.alpha = 2.0;
  par.atoms = {{{1.0, 0.0}, 0.5}, {{0.0, 1.0}, 0.5}};
  for (Vec t : {Vec{0.4, 0.0}, Vec{0.3, -0.6}, Vec{-1.0, 0.2}}) {
    double quad = 0.0;
    for (const auto& a : par.atoms) {
      double u = dot(t, a.s);
      quad += a.gamma * u * u;
    }
    std::complex<double> want = std::exp(std::complex<double>(-quad, dot(t, par.xi)));
    REQUIRE(std::abs(cf_as(par, t) - want) < 1e-12);
  }
}

TEST_CASE("projection exponent at index one carries the log correction") {
  std::complex<double> v = psi_stable(1.0, 2.0);
  REQUIRE(v.real() == Catch::Approx(2.0).margin(1e-14));
  REQUIRE(v.imag() == Catch::Approx(2.0 * (2.0 / pi_const) * std::log(2.0)).margin(1e-14));
  std::complex<double> w = psi_stable(1.0, -2.0);
  REQUIRE(w.real() == v.real());
  REQUIRE(w.imag() == Catch::Approx(-v.imag()).margin(1e-14));
}

TEST_CASE("regular polygon measure builds unit atoms of equal mass") {
  AsParams par = regular_polygon_measure(5, 1.5);
  par.xi = {0.0, 0.0};
  REQUIRE(par.atoms.size() == 5);
  double total = 0.0;
  for (const auto& a : par.atoms) {
    REQUIRE(norm2(a.s) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(a.gamma == Catch::Approx(0.2).margin(1e-12));
    total += a.gamma;
  }
  REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  REQUIRE_NOTHROW(par.validate());
}

// --- sinh-arcsinh ---

TEST_CASE("zero deformation reproduces the standard normal") {
  SasParams par{{0.0, 0.0}, {1.0, 1.0}};
  RandomStream g(SeedSpec(3009));
  Sample x = sample_sas(par, 200000, g);
  Moments m = sample_moments(x);
  REQUIRE(m.mean[0] == Catch::Approx(0.0).margin(0.01));
  REQUIRE(m.cov(0, 0) == Catch::Approx(1.0).epsilon(0.02));
  REQUIRE(m.cov(0, 1) == Catch::Approx(0.0).margin(0.01));
  double hits = 0;
  for (std::size_t i = 0; i < x.n(); ++i) hits += x(i, 1) <= 1.0;
  REQUIRE(hits / static_cast<double>(x.n()) == Catch::Approx(norm_cdf(1.0)).margin(0.006));
}

TEST_CASE("positive deformation skews every margin to the right") {
  SasParams par{{0.5, 0.5}, {1.0 / 1.5, 1.0 / 1.5}};
  RandomStream g(SeedSpec(3010));
  Sample x = sample_sas(par, 100000, g);
  for (std::size_t j = 0; j < 2; ++j) {
    double m1 = 0.0;
    for (std::size_t i = 0; i < x.n(); ++i) m1 += x(i, j);
    m1 /= static_cast<double>(x.n());
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < x.n(); ++i) {
      double d = x(i, j) - m1;
      m2 += d * d;
      m3 += d * d * d;
    }
    m2 /= static_cast<double>(x.n());
    m3 /= static_cast<double>(x.n());
    REQUIRE(m3 / std::pow(m2, 1.5) > 0.3);
  }
}

// --- canonical transforms ---

TEST_CASE("canonical map whitens the scale matrix") {
  RandomStream g(SeedSpec(3011));
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t p = 2 + trial % 3;
    Matrix a(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) a(i, j) = g.normal();
    Matrix omega(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        double v = 0.0;
        for (std::size_t k = 0; k < p; ++k) v += a(i, k) * a(j, k);
        omega(i, j) = v + (i == j ? 0.4 : 0.0);
      }
    Vec alpha(p);
    for (std::size_t j = 0; j < p; ++j) alpha[j] = 2.0 * g.normal();
    SnParams par{Vec(p, 0.0), omega, alpha};
    CanonicalInfo ci = canonical_sn(par);
    Matrix htoh = matmul(transpose(ci.h), matmul(omega, ci.h));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        REQUIRE(htoh(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-8));

    SlParams slpar{Vec(p, 0.0), omega, alpha};
    CanonicalInfo cl = canonical_sl(slpar);
    Matrix htoh2 = matmul(transpose(cl.h), matmul(omega, cl.h));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        REQUIRE(htoh2(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-8));
  }
}

TEST_CASE("canonical slant magnitude on the worked example") {
  SlParams par{{0.0, 0.0}, Matrix::diag({4.0, 1.0}), {2.0, 0.0}};
  CanonicalInfo ci = canonical_sl(par);
  REQUIRE(ci.alpha_star == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(ci.h(0, 0) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(ci.h(1, 1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("canonical transform is idempotent at the parameter level") {
  SlParams canon{{0.0, 0.0, 0.0}, Matrix::identity(3), {2.5, 0.0, 0.0}};
  CanonicalInfo ci = canonical_sl(canon);
  REQUIRE(ci.alpha_star == Catch::Approx(2.5).margin(1e-12));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      REQUIRE(ci.h(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));

  SnParams sn_canon{{0.0, 0.0}, identity2(), {3.0, 0.0}};
  CanonicalInfo cs = canonical_sn(sn_canon);
  REQUIRE(cs.alpha_star == Catch::Approx(3.0).margin(1e-12));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      REQUIRE(cs.h(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
}

TEST_CASE("heavy-tail canonical form shares the slant machinery") {
  StParams par{{1.0, 2.0}, identity2(), {1.5, -0.5}, 6.0};
  par.omega(0, 1) = par.omega(1, 0) = 0.4;
  CanonicalInfo from_st = canonical_st(par);
  CanonicalInfo from_sn = canonical_sn(par.sn_part());
  REQUIRE(from_st.alpha_star == from_sn.alpha_star);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) REQUIRE(from_st.h(i, j) == from_sn.h(i, j));
}

// --- family plumbing ---

TEST_CASE("family names round trip") {
  for (Family f : {Family::sn, Family::st, Family::sl, Family::gh, Family::as, Family::sas})
    REQUIRE(family_from_name(family_name(f)) == f);
  REQUIRE_THROWS_AS(family_from_name("weibull"), data_error);
}

TEST_CASE("spec json round trip preserves every family") {
  std::vector<FamilySpec> specs;
  specs.push_back(SnParams{{0.1, -0.2}, identity2(), {3.0, 1.0}});
  specs.push_back(StParams{{0.0, 0.0}, identity2(), {2.0, 0.0}, 7.5});
  specs.push_back(SlParams{{1.0, 2.0}, Matrix::diag({2.0, 0.5}), {0.4, -0.1}});
  specs.push_back(GhParams{{0.0, 0.0}, identity2(), {1.0, -0.5}, {0.3, 0.0}});
  AsParams as;
  as.xi = {0.5, 0.5};
  as.alpha = 1.5;
  as.atoms = {{{1.0, 0.0}, 0.4}, {{0.0, -1.0}, 0.6}};
  specs.push_back(as);
  specs.push_back(SasParams{{0.2, 0.3}, {1.0, 0.8}});

  for (const FamilySpec& s : specs) {
    nlohmann::json j = spec_to_json(s);
    FamilySpec back = spec_from_json(j);
    REQUIRE(family_of(back) == family_of(s));
    REQUIRE(spec_to_json(back) == j);
    REQUIRE(spec_dim(back) == spec_dim(s));
  }
}

TEST_CASE("spec validation rejects malformed parameters") {
  // shape problems are caught up front; definiteness surfaces at use time
  REQUIRE_THROWS(validate_spec(SnParams{{0.0, 0.0}, Matrix::identity(2), {0.0}}));
  RandomStream g(SeedSpec(3999));
  REQUIRE_THROWS_AS(sample_sn(SnParams{{0.0, 0.0}, Matrix::diag({1.0, -1.0}), {0.0, 0.0}}, 10, g),
                    numeric_error);
  REQUIRE_THROWS(validate_spec(StParams{{0.0}, Matrix::diag({1.0}), {0.0}, -2.0}));
  AsParams bad;
  bad.xi = {0.0, 0.0};
  bad.alpha = 1.5;
  bad.atoms = {{{2.0, 0.0}, 0.5}};  // direction not on the unit sphere
  REQUIRE_THROWS(validate_spec(bad));
  REQUIRE_THROWS(validate_spec(SasParams{{0.0}, {0.0}}));
}
