#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "skewgof/family.hpp"
#include "skewgof/fit_gh.hpp"
#include "skewgof/fit_sl.hpp"
#include "skewgof/fit_sn_st.hpp"
#include "skewgof/fit_stable.hpp"
#include "skewgof/parallel.hpp"
#include "skewgof/statistic.hpp"

// Test protocols.  Two calibration schemes share one evaluation pipeline
// (fit -> standardize -> draw reference sample -> two-sample ECF statistic):
//
//  * simple null: the shape is fixed in advance, only location/scatter are
//    profile-fitted; critical values come from Monte Carlo replication under
//    the fixed-shape null.
//  * composite null: all parameters are fitted; p-values come from a
//    parametric bootstrap that regenerates data from the fitted canonical
//    null, and study-scale rejection rates use the warp-speed variant (a
//    single bootstrap statistic per replication, pooled into one critical
//    value).
//
// Seed discipline: every replication r derives its streams from
// seed.child(r).child(stage), stages 0 = data, 1 = reference, 2 = bootstrap
// data, 3 = bootstrap reference.  A failed replication is retried once on
// stages +8, then skipped.  Replications are therefore addressable and
// thread-count independent.

namespace skewgof {

enum class TestMode { simple, composite };

inline const char* test_mode_name(TestMode m) {
  return m == TestMode::simple ? "simple" : "composite";
}

inline TestMode test_mode_from_name(const std::string& s) {
  if (s == "simple") return TestMode::simple;
  if (s == "composite") return TestMode::composite;
  throw std::invalid_argument("unknown test mode: " + s + " (expected simple|composite)");
}

// ---------------------------------------------------------------------------
// fit dispatch

inline FitResult fit_full(const Sample& x, Family fam) {
  switch (fam) {
    case Family::sn: return fit_sn(x);
    case Family::st: return fit_st(x);
    case Family::sl: return fit_sl(x);
    case Family::gh: return fit_gh(x);
    case Family::as: return fit_as(x);
    default: throw std::invalid_argument("fit_full: no estimator for this family");
  }
}

// Location/scatter fit with the shape frozen at the shape carried by null0.
inline FitResult fit_profile(const Sample& x, const FamilySpec& null0) {
  if (const auto* p = std::get_if<SnParams>(&null0)) return fit_sn_profile(x, sn_alpha_star(*p));
  if (const auto* p = std::get_if<StParams>(&null0))
    return fit_st_profile(x, sn_alpha_star(p->sn_part()), p->nu);
  if (const auto* p = std::get_if<SlParams>(&null0))
    return fit_sl_profile(x, canonical_sl(*p).alpha_star);
  if (const auto* p = std::get_if<GhParams>(&null0)) return fit_gh_profile(x, p->g, p->h);
  if (const auto* p = std::get_if<AsParams>(&null0)) return fit_as_location_profile(x, *p);
  throw std::invalid_argument("fit_profile: no estimator for this family");
}

// ---------------------------------------------------------------------------
// standardization and canonical nulls

// Map each row to its standardized residual under the fitted parameters:
// SN/ST/SL use the canonical transform H'(x - xi), GH unmixes by omega^{-1},
// AS translates by xi (the spectral shape is not reducible further).
inline Sample standardize(const Sample& x, const FamilySpec& fitted) {
  const std::size_t n = x.n(), p = x.p();
  Sample z(n, p);
  auto map_h = [&](const Vec& xi, const Matrix& h) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < p; ++k) s += h(k, j) * (x(i, k) - xi[k]);
        z(i, j) = s;
      }
    }
  };
  if (const auto* par = std::get_if<SnParams>(&fitted)) {
    map_h(par->xi, canonical_sn(*par).h);
  } else if (const auto* par = std::get_if<StParams>(&fitted)) {
    map_h(par->xi, canonical_st(*par).h);
  } else if (const auto* par = std::get_if<SlParams>(&fitted)) {
    map_h(par->xi, canonical_sl(*par).h);
  } else if (const auto* par = std::get_if<GhParams>(&fitted)) {
    LuFactor lu = lu_decompose(par->omega);
    Vec u(p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) u[j] = x(i, j) - par->xi[j];
      Vec w = lu_solve(lu, u);
      for (std::size_t j = 0; j < p; ++j) z(i, j) = w[j];
    }
  } else if (const auto* par = std::get_if<AsParams>(&fitted)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) z(i, j) = x(i, j) - par->xi[j];
  } else {
    throw std::invalid_argument("standardize: unsupported family");
  }
  return z;
}

// The member of the null family that the standardized data should follow:
// location zero, identity scatter, shape from the fitted parameters.
inline FamilySpec canonical_null_of(const FamilySpec& fitted) {
  if (const auto* par = std::get_if<SnParams>(&fitted)) {
    const std::size_t p = par->xi.size();
    SnParams c{Vec(p, 0.0), Matrix::identity(p), Vec(p, 0.0)};
    c.alpha[0] = sn_alpha_star(*par);
    return c;
  }
  if (const auto* par = std::get_if<StParams>(&fitted)) {
    const std::size_t p = par->xi.size();
    StParams c{Vec(p, 0.0), Matrix::identity(p), Vec(p, 0.0), par->nu};
    c.alpha[0] = sn_alpha_star(par->sn_part());
    return c;
  }
  if (const auto* par = std::get_if<SlParams>(&fitted)) {
    const std::size_t p = par->xi.size();
    SlParams c{Vec(p, 0.0), Matrix::identity(p), Vec(p, 0.0)};
    c.alpha[0] = canonical_sl(*par).alpha_star;
    return c;
  }
  if (const auto* par = std::get_if<GhParams>(&fitted)) {
    const std::size_t p = par->xi.size();
    return GhParams{Vec(p, 0.0), Matrix::identity(p), par->g, par->h};
  }
  if (const auto* par = std::get_if<AsParams>(&fitted)) {
    AsParams c = *par;
    c.xi = Vec(par->xi.size(), 0.0);
    return c;
  }
  throw std::invalid_argument("canonical_null_of: unsupported family");
}

// ---------------------------------------------------------------------------
// report types

struct ProtocolCounts {
  std::size_t completed = 0, skipped = 0, retried = 0;
};

struct TestOutcome {
  StatValue statistic;
  double p_value = -1.0;         // composite mode; -1 when not applicable
  double critical_value = -1.0;  // simple mode; -1 when not applicable
  bool reject = false;
  double delta = 0.05;
  TestMode mode = TestMode::composite;
  FamilySpec estimates;
  ProtocolCounts boot;  // bootstrap/Monte Carlo bookkeeping
  std::string notes;
};

struct StudyReport {
  std::string label;
  Family null_family = Family::sn;
  TestMode mode = TestMode::composite;
  std::size_t n = 0, m = 0, M = 0;
  double delta = 0.05;
  KernelSpec kernel = KernelSpec::gaussian();
  FamilySpec truth;
  double rejection_rate = 0.0;
  double critical_value = 0.0;
  ProtocolCounts counts;
  std::string notes;
};

namespace detail {

inline double order_quantile(std::vector<double> v, double delta) {
  // empirical (1-delta) quantile as the ceil((1-delta) M)-th order statistic
  if (v.empty()) throw numeric_error("no completed replications to take a quantile of");
  std::sort(v.begin(), v.end());
  double raw = std::ceil((1.0 - delta) * static_cast<double>(v.size()));
  std::size_t idx = static_cast<std::size_t>(std::max(1.0, std::min(raw, double(v.size()))));
  return v[idx - 1];
}

// One full evaluation: fit under the null (profile when null0 is given, full
// otherwise), standardize, draw the reference sample from the fitted
// canonical null, return the statistic.  Throws on estimator failure.
struct EvalOut {
  double t = std::numeric_limits<double>::quiet_NaN();
  FamilySpec fitted;
  FamilySpec canon;
};

inline EvalOut evaluate_once(const Sample& x, Family fam, const FamilySpec* null0, std::size_t m,
                             const KernelSpec& kernel, RandomStream& ref_stream) {
  EvalOut out;
  FitResult fr = null0 ? fit_profile(x, *null0) : fit_full(x, fam);
  out.fitted = fr.params;
  Sample z = standardize(x, out.fitted);
  out.canon = canonical_null_of(out.fitted);
  Sample x0 = sample_any(out.canon, m, ref_stream);
  out.t = t_stat(z, x0, kernel, 1).value;
  if (!std::isfinite(out.t)) throw numeric_error("non-finite test statistic");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simple-null protocol

struct CriticalResult {
  double c_hat = 0.0;
  std::vector<double> null_stats;  // completed replications, replication order
  ProtocolCounts counts;
};

// Monte Carlo critical value under the fixed-shape null: replications draw
// data and reference from null0's canonical member, profile-fit the nuisance
// parameters, and take the (1-delta) order-statistic quantile.
inline CriticalResult simple_null_critical(const FamilySpec& null0, std::size_t n, std::size_t m,
                                           std::size_t M, double delta, const KernelSpec& kernel,
                                           const SeedSpec& seed, int threads = 0) {
  validate_spec(null0);
  if (M < 1) throw std::invalid_argument("simple_null_critical: M >= 1 required");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("simple_null_critical: delta in (0,1) required");
  Family fam = family_of(null0);
  FamilySpec gen = canonical_null_of(null0);

  std::vector<double> tvals(M, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> attempts(M, 0);
  parallel_for(M, threads, [&](std::size_t r) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t off = attempt * 8;
      try {
        RandomStream gx(seed.child(r).child(0 + off));
        Sample x = sample_any(gen, n, gx);
        RandomStream gref(seed.child(r).child(1 + off));
        detail::EvalOut ev = detail::evaluate_once(x, fam, &null0, m, kernel, gref);
        tvals[r] = ev.t;
        attempts[r] = static_cast<std::uint8_t>(attempt + 1);
        return;
      } catch (const std::exception&) {
        // retry once on fresh streams, then leave the slot empty
      }
    }
  });

  CriticalResult out;
  for (std::size_t r = 0; r < M; ++r) {
    if (attempts[r] == 0) {
      ++out.counts.skipped;
      continue;
    }
    if (attempts[r] == 2) ++out.counts.retried;
    ++out.counts.completed;
    out.null_stats.push_back(tvals[r]);
  }
  out.c_hat = detail::order_quantile(out.null_stats, delta);
  return out;
}

// Rejection rate of the simple-null test against one alternative: L fresh
// datasets from `alternative` run through the same pipeline, rejecting when
// the statistic exceeds c_hat.
inline StudyReport simple_null_power(const FamilySpec& null0, const FamilySpec& alternative,
                                     std::size_t n, std::size_t m, std::size_t L, double delta,
                                     const KernelSpec& kernel, double c_hat, const SeedSpec& seed,
                                     int threads = 0) {
  validate_spec(null0);
  validate_spec(alternative);
  Family fam = family_of(null0);

  std::vector<double> tvals(L, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> attempts(L, 0);
  parallel_for(L, threads, [&](std::size_t r) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t off = attempt * 8;
      try {
        RandomStream gx(seed.child(r).child(4 + off));
        Sample x = sample_any(alternative, n, gx);
        RandomStream gref(seed.child(r).child(5 + off));
        detail::EvalOut ev = detail::evaluate_once(x, fam, &null0, m, kernel, gref);
        tvals[r] = ev.t;
        attempts[r] = static_cast<std::uint8_t>(attempt + 1);
        return;
      } catch (const std::exception&) {
      }
    }
  });

  StudyReport rep;
  rep.null_family = fam;
  rep.mode = TestMode::simple;
  rep.n = n;
  rep.m = m;
  rep.M = L;
  rep.delta = delta;
  rep.kernel = kernel;
  rep.truth = alternative;
  rep.critical_value = c_hat;
  std::size_t rejections = 0;
  for (std::size_t r = 0; r < L; ++r) {
    if (attempts[r] == 0) {
      ++rep.counts.skipped;
      continue;
    }
    if (attempts[r] == 2) ++rep.counts.retried;
    ++rep.counts.completed;
    if (tvals[r] > c_hat) ++rejections;
  }
  if (rep.counts.completed == 0) throw numeric_error("simple_null_power: all replications failed");
  rep.rejection_rate =
      static_cast<double>(rejections) / static_cast<double>(rep.counts.completed);
  return rep;
}

// One critical value, several alternatives: the power-curve building block.
// Seed layout: child(0) calibrates, child(1 + a) runs alternative a.
struct SimpleStudyResult {
  CriticalResult critical;
  std::vector<StudyReport> cells;
};

inline SimpleStudyResult simple_study(const FamilySpec& null0,
                                      const std::vector<FamilySpec>& alternatives, std::size_t n,
                                      std::size_t m, std::size_t M, std::size_t L, double delta,
                                      const KernelSpec& kernel, const SeedSpec& seed,
                                      int threads = 0) {
  SimpleStudyResult out;
  out.critical = simple_null_critical(null0, n, m, M, delta, kernel, seed.child(0), threads);
  for (std::size_t a = 0; a < alternatives.size(); ++a) {
    out.cells.push_back(simple_null_power(null0, alternatives[a], n, m, L, delta, kernel,
                                          out.critical.c_hat, seed.child(1 + a), threads));
  }
  return out;
}

// ---------------------------------------------------------------------------
// composite protocol

// Parametric bootstrap p-value on one dataset.  The bootstrap regenerates
// n-sized data from the fitted canonical null, refits, restandardizes, and
// redraws its own reference sample.  A failed cycle is retried once on fresh
// streams and then skipped; 5% or more skipped cycles abort the test.
inline TestOutcome composite_test(const Sample& x, Family fam, std::size_t m, std::size_t B,
                                  double delta, const KernelSpec& kernel, const SeedSpec& seed,
                                  int threads = 0) {
  if (B < 1) throw std::invalid_argument("composite_test: B >= 1 required");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("composite_test: delta in (0,1) required");

  TestOutcome out;
  out.mode = TestMode::composite;
  out.delta = delta;

  FitResult fr = fit_full(x, fam);  // failure here is a hard error
  out.estimates = fr.params;
  Sample z = standardize(x, fr.params);
  FamilySpec canon = canonical_null_of(fr.params);
  RandomStream gref(seed.child(0).child(1));
  Sample x0 = sample_any(canon, m, gref);
  out.statistic = t_stat(z, x0, kernel, threads);

  const std::size_t n = x.n();
  std::vector<double> tstar(B, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> attempts(B, 0);
  parallel_for(B, threads, [&](std::size_t b) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t off = attempt * 8;
      try {
        RandomStream gb(seed.child(b + 1).child(2 + off));
        Sample xb = sample_any(canon, n, gb);
        RandomStream gbr(seed.child(b + 1).child(3 + off));
        detail::EvalOut ev = detail::evaluate_once(xb, fam, nullptr, m, kernel, gbr);
        tstar[b] = ev.t;
        attempts[b] = static_cast<std::uint8_t>(attempt + 1);
        return;
      } catch (const std::exception&) {
      }
    }
  });

  std::size_t exceed = 0;
  for (std::size_t b = 0; b < B; ++b) {
    if (attempts[b] == 0) {
      ++out.boot.skipped;
      continue;
    }
    if (attempts[b] == 2) ++out.boot.retried;
    ++out.boot.completed;
    if (tstar[b] >= out.statistic.value) ++exceed;
  }
  if (out.boot.skipped * 20 >= B)
    throw numeric_error("composite_test: " + std::to_string(out.boot.skipped) + " of " +
                        std::to_string(B) +
                        " bootstrap cycles failed estimation (>= 5%); refusing to report a "
                        "p-value from this few cycles");
  out.p_value =
      (1.0 + static_cast<double>(exceed)) / (static_cast<double>(out.boot.completed) + 1.0);
  out.reject = out.p_value <= delta;
  return out;
}

// Single-dataset simple-mode test: Monte Carlo critical value under the
// fixed-shape null plus the data statistic.  Reports a Monte Carlo p-value
// alongside the reject decision for convenience.
inline TestOutcome simple_test(const Sample& x, const FamilySpec& null0, std::size_t m,
                               std::size_t M, double delta, const KernelSpec& kernel,
                               const SeedSpec& seed, int threads = 0) {
  TestOutcome out;
  out.mode = TestMode::simple;
  out.delta = delta;
  CriticalResult crit =
      simple_null_critical(null0, x.n(), m, M, delta, kernel, seed.child(0), threads);
  out.critical_value = crit.c_hat;
  out.boot = crit.counts;

  FitResult fr = fit_profile(x, null0);
  out.estimates = fr.params;
  Sample z = standardize(x, fr.params);
  FamilySpec canon = canonical_null_of(fr.params);
  RandomStream gref(seed.child(1).child(1));
  Sample x0 = sample_any(canon, m, gref);
  out.statistic = t_stat(z, x0, kernel, threads);

  std::size_t exceed = 0;
  for (double t : crit.null_stats)
    if (t >= out.statistic.value) ++exceed;
  out.p_value = (1.0 + static_cast<double>(exceed)) /
                (static_cast<double>(crit.counts.completed) + 1.0);
  out.reject = out.statistic.value > crit.c_hat;
  return out;
}

// ---------------------------------------------------------------------------
// warp-speed study

// M replications, each carrying one bootstrap statistic; the bootstrap pool
// yields a single critical value and the main statistics are scored against
// it.  `truth` generates the data (equal to the null for size studies);
// `null_family` is the family being tested.
inline StudyReport warp_speed_study(const FamilySpec& truth, Family null_family, std::size_t n,
                                    std::size_t m, std::size_t M, double delta,
                                    const KernelSpec& kernel, const SeedSpec& seed,
                                    int threads = 0, const std::string& label = "") {
  validate_spec(truth);
  if (M < 2) throw std::invalid_argument("warp_speed_study: M >= 2 required");
  std::vector<double> tmain(M, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> tboot(M, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> attempts(M, 0);

  parallel_for(M, threads, [&](std::size_t r) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      const std::uint64_t off = attempt * 8;
      try {
        RandomStream gx(seed.child(r).child(0 + off));
        Sample x = sample_any(truth, n, gx);
        RandomStream gref(seed.child(r).child(1 + off));
        detail::EvalOut ev = detail::evaluate_once(x, null_family, nullptr, m, kernel, gref);

        RandomStream gb(seed.child(r).child(2 + off));
        Sample xb = sample_any(ev.canon, n, gb);
        RandomStream gbr(seed.child(r).child(3 + off));
        detail::EvalOut evb = detail::evaluate_once(xb, null_family, nullptr, m, kernel, gbr);

        tmain[r] = ev.t;
        tboot[r] = evb.t;
        attempts[r] = static_cast<std::uint8_t>(attempt + 1);
        return;
      } catch (const std::exception&) {
      }
    }
  });

  StudyReport rep;
  rep.label = label;
  rep.null_family = null_family;
  rep.mode = TestMode::composite;
  rep.n = n;
  rep.m = m;
  rep.M = M;
  rep.delta = delta;
  rep.kernel = kernel;
  rep.truth = truth;
  std::vector<double> pool;
  std::vector<double> kept;
  for (std::size_t r = 0; r < M; ++r) {
    if (attempts[r] == 0) {
      ++rep.counts.skipped;
      continue;
    }
    if (attempts[r] == 2) ++rep.counts.retried;
    ++rep.counts.completed;
    kept.push_back(tmain[r]);
    pool.push_back(tboot[r]);
  }
  if (rep.counts.completed == 0) throw numeric_error("warp_speed_study: all replications failed");
  rep.critical_value = detail::order_quantile(pool, delta);
  std::size_t rejections = 0;
  for (double t : kept)
    if (t > rep.critical_value) ++rejections;
  rep.rejection_rate =
      static_cast<double>(rejections) / static_cast<double>(rep.counts.completed);
  if (rep.counts.skipped > 0)
    rep.notes = std::to_string(rep.counts.skipped) + " replications skipped after retry";
  return rep;
}

}  // namespace skewgof
