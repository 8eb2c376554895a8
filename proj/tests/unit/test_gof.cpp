#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "skewgof/gof.hpp"

using namespace skewgof;

TEST_CASE("order-statistic quantile picks the documented rank") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::shuffle(v.begin(), v.end(), std::mt19937(7));
  REQUIRE(detail::order_quantile(v, 0.05) == 95.0);
  REQUIRE(detail::order_quantile(v, 0.10) == 90.0);
  REQUIRE(detail::order_quantile(v, 0.999) == 1.0);

  std::vector<double> w(500);
  std::iota(w.begin(), w.end(), 1.0);
  REQUIRE(detail::order_quantile(w, 0.10) == 450.0);
  REQUIRE_THROWS_AS(detail::order_quantile({}, 0.05), numeric_error);
}

TEST_CASE("standardizing with the generating parameters recovers the canonical law") {
  SnParams truth{{1.0, -2.0}, Matrix::identity(2), {3.0, -1.0}};
  truth.omega(0, 1) = truth.omega(1, 0) = 0.4;
  RandomStream g(SeedSpec(5001));
  Sample x = sample_sn(truth, 100000, g);
  Sample z = standardize(x, FamilySpec{truth});

  double astar = sn_alpha_star(truth);
  double dstar = astar / std::sqrt(1.0 + astar * astar);
  Vec mean = z.column_mean();
  REQUIRE(mean[0] == Catch::Approx(std::sqrt(2.0 / pi_const) * dstar).margin(0.015));
  REQUIRE(mean[1] == Catch::Approx(0.0).margin(0.015));
  Matrix cov = z.covariance();
  REQUIRE(cov(0, 0) == Catch::Approx(1.0 - (2.0 / pi_const) * dstar * dstar).margin(0.02));
  REQUIRE(cov(1, 1) == Catch::Approx(1.0).margin(0.02));
  REQUIRE(cov(0, 1) == Catch::Approx(0.0).margin(0.02));
}

TEST_CASE("canonical null of a fitted spec strips location and scale") {
  SnParams par{{1.0, 2.0}, Matrix::diag({4.0, 9.0}), {2.0, 1.0}};
  FamilySpec canon = canonical_null_of(FamilySpec{par});
  const auto& c = std::get<SnParams>(canon);
  REQUIRE(c.xi == Vec{0.0, 0.0});
  REQUIRE(c.omega(0, 0) == 1.0);
  REQUIRE(c.omega(1, 1) == 1.0);
  REQUIRE(c.alpha[0] == Catch::Approx(sn_alpha_star(par)).margin(1e-12));
  REQUIRE(c.alpha[1] == 0.0);

  GhParams gh{{1.0, 2.0}, Matrix::diag({2.0, 3.0}), {0.5, -0.2}, {0.1, 0.3}};
  FamilySpec gcanon = canonical_null_of(FamilySpec{gh});
  const auto& cg = std::get<GhParams>(gcanon);
  REQUIRE(cg.xi == Vec{0.0, 0.0});
  REQUIRE(cg.g == gh.g);
  REQUIRE(cg.h == gh.h);
}

TEST_CASE("one evaluation cycle produces a finite statistic and a canonical spec") {
  SnParams truth{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}};
  RandomStream g(SeedSpec(5002));
  Sample x = sample_sn(truth, 120, g);
  RandomStream gref(SeedSpec(5003));
  detail::EvalOut ev = detail::evaluate_once(x, Family::sn, nullptr, 200, KernelSpec::gaussian(), gref);
  REQUIRE(std::isfinite(ev.t));
  REQUIRE(ev.t >= 0.0);
  REQUIRE(family_of(ev.fitted) == Family::sn);
  const auto& canon = std::get<SnParams>(ev.canon);
  REQUIRE(canon.xi == Vec{0.0, 0.0});
  REQUIRE(canon.alpha[1] == 0.0);
}

TEST_CASE("composite test is reproducible and thread-count invariant") {
  SnParams truth{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}};
  RandomStream g(SeedSpec(5004));
  Sample x = sample_sn(truth, 60, g);

  TestOutcome a = composite_test(x, Family::sn, 100, 40, 0.05, KernelSpec::gaussian(),
                                 SeedSpec(99), 1);
  TestOutcome b = composite_test(x, Family::sn, 100, 40, 0.05, KernelSpec::gaussian(),
                                 SeedSpec(99), 1);
  TestOutcome c = composite_test(x, Family::sn, 100, 40, 0.05, KernelSpec::gaussian(),
                                 SeedSpec(99), 3);
  REQUIRE(a.statistic.value == b.statistic.value);
  REQUIRE(a.p_value == b.p_value);
  REQUIRE(a.statistic.value == c.statistic.value);
  REQUIRE(a.p_value == c.p_value);

  // p-value has the add-one Monte Carlo form over completed cycles
  REQUIRE(a.p_value > 0.0);
  REQUIRE(a.p_value <= 1.0);
  double k = a.p_value * (static_cast<double>(a.boot.completed) + 1.0) - 1.0;
  REQUIRE(k == Catch::Approx(std::round(k)).margin(1e-9));
  REQUIRE(a.reject == (a.p_value <= a.delta));
  REQUIRE(a.boot.completed + a.boot.skipped == 40);
  REQUIRE(a.mode == TestMode::composite);
}

TEST_CASE("simple test scores the statistic against the pool quantile") {
  SnParams null0{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}};
  RandomStream g(SeedSpec(5005));
  Sample x = sample_sn(null0, 80, g);

  TestOutcome a = simple_test(x, FamilySpec{null0}, 100, 60, 0.05, KernelSpec::gaussian(),
                              SeedSpec(123), 1);
  TestOutcome b = simple_test(x, FamilySpec{null0}, 100, 60, 0.05, KernelSpec::gaussian(),
                              SeedSpec(123), 2);
  REQUIRE(a.statistic.value == b.statistic.value);
  REQUIRE(a.critical_value == b.critical_value);
  REQUIRE(a.mode == TestMode::simple);
  REQUIRE(a.reject == (a.statistic.value > a.critical_value));
  REQUIRE(a.p_value > 0.0);
  REQUIRE(a.p_value <= 1.0);
  REQUIRE(a.critical_value > 0.0);
}

TEST_CASE("composite test rejects an alternative far from the null family") {
  // strongly heavy-tailed data against the light-tailed null
  StParams truth{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}, 1.0};
  RandomStream g(SeedSpec(5006));
  Sample x = sample_st(truth, 150, g);
  TestOutcome out = composite_test(x, Family::sn, 300, 99, 0.05, KernelSpec::gaussian(),
                                   SeedSpec(5007), 0);
  REQUIRE(out.reject);
  REQUIRE(out.p_value <= 0.02);
}

TEST_CASE("warp-speed size study lands near the nominal level") {
  SnParams null0{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}};
  StudyReport rep = warp_speed_study(FamilySpec{null0}, Family::sn, 50, 50, 200, 0.05,
                                     KernelSpec::gaussian(), SeedSpec(5008), 0, "size-smoke");
  REQUIRE(rep.label == "size-smoke");
  REQUIRE(rep.counts.completed >= 190);
  REQUIRE(rep.counts.completed + rep.counts.skipped == 200);
  REQUIRE(rep.rejection_rate >= 0.0);
  REQUIRE(rep.rejection_rate <= 0.20);
  REQUIRE(rep.critical_value > 0.0);
  REQUIRE(rep.n == 50);
  REQUIRE(rep.m == 50);

  StudyReport again = warp_speed_study(FamilySpec{null0}, Family::sn, 50, 50, 200, 0.05,
                                       KernelSpec::gaussian(), SeedSpec(5008), 3, "size-smoke");
  REQUIRE(rep.rejection_rate == again.rejection_rate);
  REQUIRE(rep.critical_value == again.critical_value);
}

TEST_CASE("fixed-shape study separates the matching and distant slants") {
  SnParams null0{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}};
  std::vector<FamilySpec> alts;
  alts.push_back(SnParams{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}});       // the null itself
  alts.push_back(StParams{{0.0, 0.0}, Matrix::identity(2), {3.0, 0.0}, 1.0});  // cauchy tails
  SimpleStudyResult res = simple_study(FamilySpec{null0}, alts, 60, 80, 120, 120, 0.05,
                                       KernelSpec::gaussian(), SeedSpec(5009), 0);
  REQUIRE(res.critical.counts.completed >= 114);
  REQUIRE(res.cells.size() == 2);
  REQUIRE(res.cells[0].rejection_rate < 0.2);
  REQUIRE(res.cells[1].rejection_rate > res.cells[0].rejection_rate);
  REQUIRE(res.cells[1].rejection_rate > 0.5);
}

TEST_CASE("protocol guards reject out-of-range controls") {
  SnParams null0{{0.0}, Matrix::diag({1.0}), {2.0}};
  Sample x(10, 1);
  for (std::size_t i = 0; i < 10; ++i) x(i, 0) = static_cast<double>(i) * 0.3 - 1.0;
  REQUIRE_THROWS_AS(
      composite_test(x, Family::sn, 50, 0, 0.05, KernelSpec::gaussian(), SeedSpec(1), 1),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      composite_test(x, Family::sn, 50, 10, 1.5, KernelSpec::gaussian(), SeedSpec(1), 1),
      std::invalid_argument);
}
