#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "skewgof/rng.hpp"

using namespace skewgof;

TEST_CASE("identical seeds give identical streams") {
  RandomStream a(SeedSpec(42).child(7));
  RandomStream b(SeedSpec(42).child(7));
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("sibling and nested children decorrelate") {
  SeedSpec root(42);
  RandomStream a(root.child(1));
  RandomStream b(root.child(2));
  RandomStream c(root.child(1).child(0));
  std::uint64_t ua = a.next_u64(), ub = b.next_u64(), uc = c.next_u64();
  REQUIRE(ua != ub);
  REQUIRE(ua != uc);
  REQUIRE(ub != uc);
}

TEST_CASE("path length is part of the stream identity") {
  // (42).child(0) must not collide with (42) even though mixing 0 could be
  // a no-op in a naive hash
  RandomStream a((SeedSpec(42)));
  RandomStream b(SeedSpec(42).child(0));
  REQUIRE(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform01 stays in range with the right first moments") {
  RandomStream g(SeedSpec(1001));
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = g.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  double mean = s / n, var = s2 / n - mean * mean;
  REQUIRE(mean == Catch::Approx(0.5).margin(0.004));
  REQUIRE(var == Catch::Approx(1.0 / 12.0).margin(0.002));
}

TEST_CASE("normal moments") {
  RandomStream g(SeedSpec(1002));
  const int n = 200000;
  double s = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = g.normal();
    s += z;
    s2 += z * z;
    s3 += z * z * z;
  }
  REQUIRE(s / n == Catch::Approx(0.0).margin(0.012));
  REQUIRE(s2 / n == Catch::Approx(1.0).margin(0.02));
  REQUIRE(s3 / n == Catch::Approx(0.0).margin(0.05));
}

TEST_CASE("exponential and gamma moments") {
  RandomStream g(SeedSpec(1003));
  const int n = 200000;
  double se = 0.0;
  for (int i = 0; i < n; ++i) se += g.exponential();
  REQUIRE(se / n == Catch::Approx(1.0).margin(0.012));

  // gamma(k, theta): mean k theta, variance k theta^2 — both shape regimes
  for (double k : {0.6, 2.5}) {
    double theta = 2.0, s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = g.gamma(k, theta);
      REQUIRE(x > 0.0);
      s += x;
      s2 += x * x;
    }
    double mean = s / n, var = s2 / n - mean * mean;
    REQUIRE(mean == Catch::Approx(k * theta).epsilon(0.02));
    REQUIRE(var == Catch::Approx(k * theta * theta).epsilon(0.05));
  }
}

TEST_CASE("inverse gamma moments") {
  RandomStream g(SeedSpec(1004));
  const int n = 200000;
  double a = 3.0, b = 2.0, s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = g.inverse_gamma(a, b);
    s += x;
    s2 += x * x;
  }
  double mean = s / n, var = s2 / n - mean * mean;
  REQUIRE(mean == Catch::Approx(b / (a - 1.0)).epsilon(0.02));  // = 1
  REQUIRE(var == Catch::Approx(1.0).epsilon(0.15));             // b^2/((a-1)^2 (a-2))
}

TEST_CASE("stable draw at index two is a scaled normal") {
  RandomStream g(SeedSpec(1005));
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = g.stable(2.0, 0.7);  // beta is inert at alpha = 2
    s += x;
    s2 += x * x;
  }
  REQUIRE(s / n == Catch::Approx(0.0).margin(0.02));
  REQUIRE(s2 / n == Catch::Approx(2.0).epsilon(0.02));  // variance 2 sigma^2
}

TEST_CASE("positive stable draws match the Laplace transform") {
  // for alpha < 1, beta = 1, scale 1: E exp(-u X) = exp(-u^alpha / cos(pi alpha / 2))
  RandomStream g(SeedSpec(1006));
  const int n = 400000;
  const double alpha = 0.5;
  double s1 = 0.0, s1sq = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = g.stable(alpha, 1.0);
    REQUIRE(x > 0.0);
    double e1 = std::exp(-x);
    s1 += e1;
    s1sq += e1 * e1;
    s2 += std::exp(-3.0 * x);
  }
  double target1 = std::exp(-1.0 / std::cos(0.25 * 3.14159265358979324));
  double target2 = std::exp(-std::sqrt(3.0) / std::cos(0.25 * 3.14159265358979324));
  double m1 = s1 / n;
  double se1 = std::sqrt((s1sq / n - m1 * m1) / n);
  REQUIRE(m1 == Catch::Approx(target1).margin(6.0 * se1 + 1e-9));
  REQUIRE(s2 / n == Catch::Approx(target2).margin(0.006));
}

TEST_CASE("stable scale and location enter affinely") {
  RandomStream a(SeedSpec(1007));
  RandomStream b(SeedSpec(1007));
  for (int i = 0; i < 50; ++i) {
    double raw = a.stable(1.5, 0.3);
    double moved = b.stable(1.5, 0.3, 2.0, -1.0);
    REQUIRE(moved == Catch::Approx(2.0 * raw - 1.0).margin(1e-12));
  }
}
