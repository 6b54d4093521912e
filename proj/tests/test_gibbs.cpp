#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gibbs.hpp"
#include "ifs.hpp"
#include "metrics.hpp"
#include "quad.hpp"
#include "samplers.hpp"
#include "stats.hpp"

using namespace mcb;

namespace {

// CDF of a DensitySpec tabulated by cumulative trapezoid on a fine grid.
std::function<double(double)> tabulated_cdf(const DensitySpec& spec, int bins = 4096) {
  std::vector<double> grid(bins + 1), cum(bins + 1, 0.0);
  for (int i = 0; i <= bins; ++i) {
    grid[i] = spec.lo + (spec.hi - spec.lo) * i / bins;
  }
  for (int i = 1; i <= bins; ++i) {
    cum[i] = cum[i - 1] +
             0.5 * (spec.pdf(grid[i - 1]) + spec.pdf(grid[i])) * (grid[i] - grid[i - 1]);
  }
  double total = cum[bins];
  return [grid, cum, total](double x) {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    std::size_t hi = std::upper_bound(grid.begin(), grid.end(), x) - grid.begin();
    double t = (x - grid[hi - 1]) / (grid[hi] - grid[hi - 1]);
    return (cum[hi - 1] + t * (cum[hi] - cum[hi - 1])) / total;
  };
}

}  // namespace

TEST_CASE("drift rates for the built-in cases, K = 1") {
  struct Row {
    char which;
    double r1, r2, r3;
  };
  const Row rows[] = {{'A', 1.0, 5.0 / 6.0, 0.9776106486317356},
                      {'B', 0.6, 5.25, 1.0217982383412052},
                      {'C', 1.2, 1.8229166666666667, 0.936841102748011}};
  for (const Row& row : rows) {
    GibbsConstants c = compute_constants(GibbsModel::builtin(row.which, 1), 1.0);
    REQUIRE(c.has_r1);
    REQUIRE(c.has_r2);
    REQUIRE(c.has_r3);
    CHECK(c.r1 == doctest::Approx(row.r1).epsilon(1e-12));
    CHECK(c.r2 == doctest::Approx(row.r2).epsilon(1e-12));
    CHECK(c.r3 == doctest::Approx(row.r3).epsilon(1e-12));
  }
}

TEST_CASE("truncated drift constants for the built-in cases, K = 0") {
  struct Row {
    char which;
    double eps, r1, A, r1_eps, c_hat;
  };
  const Row rows[] = {
      {'A', 1.0, 0.1, 1.0 / 1200.0, 0.1 + 1.0 / 1200.0, 202.44125},
      {'B', 0.5, 0.2, 0.07, 0.235, 31.28},
      {'C', 1.0, 0.2, 1.75 / 144.0, 0.2 + 1.75 / 144.0, 55.28333333333333}};
  for (const Row& row : rows) {
    GibbsModel m = GibbsModel::builtin(row.which, 0);
    GibbsConstants c = compute_constants(m, row.eps);
    CHECK(c.r1 == doctest::Approx(row.r1).epsilon(1e-12));
    CHECK(c.A == doctest::Approx(row.A).epsilon(1e-12));
    CHECK(c.r1_eps == doctest::Approx(row.r1_eps).epsilon(1e-12));
    BoundCurve w = wasserstein_bound(m, WassersteinVariant::I, row.eps, 1.0);
    double c_hat = w.coefficient * (1.0 - w.base);
    CHECK(c_hat == doctest::Approx(row.c_hat).epsilon(1e-10));
  }
  // A explicitly: (alpha + J/2)(0+1)(0+1/2)/sigma0^2.
  GibbsConstants cb = compute_constants(GibbsModel::builtin('B', 0), 0.5);
  CHECK(cb.A == doctest::Approx(0.07).epsilon(1e-12));
  GibbsConstants ca = compute_constants(GibbsModel::builtin('A', 0), 1.0);
  CHECK(ca.A == doctest::Approx(1.0 / 1200.0).epsilon(1e-12));
}

TEST_CASE("wasserstein bound curves and thresholds") {
  // K = 1, start x = 1, tightest quoted variants.
  BoundCurve wa =
      wasserstein_bound(GibbsModel::builtin('A', 1), WassersteinVariant::II, 1.0, 1.0);
  CHECK(wa.coefficient == doctest::Approx(6.6).epsilon(1e-12));
  CHECK(wa.base == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(first_n_below_printed(wa, 0.01) == 36);

  BoundCurve wb =
      wasserstein_bound(GibbsModel::builtin('B', 1), WassersteinVariant::I, 0.5, 1.0);
  CHECK(wb.coefficient == doctest::Approx(103.4362684836437).epsilon(1e-12));
  CHECK(wb.base == doctest::Approx(0.705).epsilon(1e-12));
  CHECK(first_n_below_printed(wb, 0.01) == 27);

  BoundCurve wc = wasserstein_bound(GibbsModel::builtin('C', 1),
                                    WassersteinVariant::III, 0.01, 1.0);
  CHECK(wc.coefficient == doctest::Approx(12858.370059792982).epsilon(1e-12));
  CHECK(wc.base == doctest::Approx(0.9398873523873196).epsilon(1e-12));
  CHECK(first_n_below_printed(wc, 0.01) == 228);

  // K = 0 thresholds at the quoted epsilons.
  const double eps0[] = {1.0, 0.5, 1.0};
  const int thr0[] = {5, 6, 6};
  const char which[] = {'A', 'B', 'C'};
  for (int i = 0; i < 3; ++i) {
    BoundCurve w = wasserstein_bound(GibbsModel::builtin(which[i], 0),
                                     WassersteinVariant::I, eps0[i], 1.0);
    CHECK(first_n_below_printed(w, 0.01) == thr0[i]);
  }

  // Unavailable variants are reported, not silently extrapolated.
  CHECK_THROWS_WITH_AS(wasserstein_bound(GibbsModel::builtin('C', 1),
                                         WassersteinVariant::II, 1.0, 1.0),
                       doctest::Contains("bound unavailable"),
                       std::invalid_argument);
  CHECK_THROWS_AS(wasserstein_bound(GibbsModel::builtin('A', 0),
                                    WassersteinVariant::II, 1.0, 1.0),
                  std::invalid_argument);

  CHECK_THROWS_AS(wa.eval(0), std::invalid_argument);
  CHECK(wa.eval(1) == doctest::Approx(6.6 * 5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("tv bound curves and thresholds") {
  // K = 1: factor (J/2)(1 + |ybar|/sqrt(2 pi)) applied at n - 1.
  struct Row {
    char which;
    WassersteinVariant v;
    double eps, factor;
    int threshold;
  };
  const Row rows[] = {
      {'A', WassersteinVariant::II, 1.0, 7.992067103010745, 49},
      {'B', WassersteinVariant::I, 0.5, 2.9986778505017906, 31},
      {'C', WassersteinVariant::III, 0.01, 3.4973557010035816, 249}};
  for (const Row& row : rows) {
    GibbsModel m = GibbsModel::builtin(row.which, 1);
    BoundCurve w = wasserstein_bound(m, row.v, row.eps, 1.0);
    BoundCurve tv = tv_bound(m, w);
    CHECK(tv.start_index == w.start_index + 1);
    CHECK(tv.coefficient ==
          doctest::Approx(row.factor * w.coefficient / w.base).epsilon(1e-12));
    CHECK(first_n_below_printed(tv, 0.01) == row.threshold);
  }

  // K = 0: TV(n) = C_tilde * W(n-1)^w.
  struct Row0 {
    char which;
    double eps, w, c_tilde;
    int threshold;
  };
  const Row0 rows0[] = {{'A', 1.0, 11.0 / 13.0, 8721.819033596843, 11},
                        {'B', 0.5, 0.75, 3.6417879612606145, 10},
                        {'C', 1.0, 0.75, 20.957042747315786, 11}};
  for (const Row0& row : rows0) {
    GibbsModel m = GibbsModel::builtin(row.which, 0);
    GibbsConstants c = compute_constants(m, row.eps);
    CHECK(c.w == doctest::Approx(row.w).epsilon(1e-12));
    CHECK(c.C_tilde == doctest::Approx(row.c_tilde).epsilon(1e-12));
    BoundCurve w = wasserstein_bound(m, WassersteinVariant::I, row.eps, 1.0);
    BoundCurve tv = tv_bound(m, w);
    CHECK(tv.exponent_scale == doctest::Approx(row.w).epsilon(1e-12));
    CHECK(tv.coefficient ==
          doctest::Approx(row.c_tilde * std::pow(w.coefficient / w.base, row.w))
              .epsilon(1e-12));
    CHECK(first_n_below_printed(tv, 0.01) == row.threshold);
    // The curve evaluates to the defining relation W(n-1)^w.
    CHECK(tv.eval(5) ==
          doctest::Approx(row.c_tilde * std::pow(w.eval(4), row.w)).epsilon(1e-12));
  }
}

TEST_CASE("printed-precision rounding") {
  CHECK(round_up_sigfigs(6.6, 3) == doctest::Approx(6.6).epsilon(1e-14));
  CHECK(round_up_sigfigs(0.705, 3) == doctest::Approx(0.705).epsilon(1e-14));
  CHECK(round_up_sigfigs(12858.370059792982, 3) == doctest::Approx(12900.0));
  CHECK(round_up_sigfigs(0.9398873523873196, 3) == doctest::Approx(0.94));
  CHECK(round_up_sigfigs(103.4362684836437, 3) == doctest::Approx(104.0));
}

TEST_CASE("data ingestion and standardization") {
  GibbsModel m = ingest_data({0.0, 2.0}, 1.0, 1.0, 0.0, 0.0);
  CHECK(m.J == 2);
  CHECK(m.K == 0);
  CHECK(m.y_bar == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.sigma0 == doctest::Approx(2.0).epsilon(1e-14));

  // Raw precision 4, prior mean 3: y -> (y - 3) * 2, beta -> 4 beta, K -> 1.
  std::vector<double> raw = {2.0, 3.5, 4.0, 2.5};
  GibbsModel std_model = ingest_data(raw, 1.5, 0.25, 4.0, 3.0);
  std::vector<double> manual;
  for (double v : raw) manual.push_back((v - 3.0) * 2.0);
  double mean = sample_mean(manual);
  double ss = 0.0;
  for (double v : manual) ss += (v - mean) * (v - mean);
  GibbsModel direct = GibbsModel::from_stats(4, 1.5, mean, 1.0 + 0.5 * ss, 1, 1.0);
  CHECK(std_model.K == 1);
  CHECK(std_model.y_bar == doctest::Approx(direct.y_bar).epsilon(1e-14));
  CHECK(std_model.sigma0 == doctest::Approx(direct.sigma0).epsilon(1e-14));
  CHECK(std_model.beta == doctest::Approx(1.0).epsilon(1e-14));

  // The standardized and directly specified kernels agree in distribution.
  RandomMapSystem s1 = gibbs_system(std_model);
  RandomMapSystem s2 = gibbs_system(direct);
  std::vector<double> a(5000), b(5000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = forward_iterate(s1, 1.0, 1, RngStream(61, i)).states[1];
    b[i] = forward_iterate(s2, 1.0, 1, RngStream(62, i)).states[1];
  }
  CHECK(ks_two_sample(a, b) < ks_critical_two_sample(5000, 5000, 0.01));

  CHECK_THROWS_AS(ingest_data({1.0, 1.0, 1.0}, 1.0, 0.0, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ingest_data({}, 1.0, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("map structure under pinned noise") {
  GibbsModel m0 = GibbsModel::builtin('B', 0);
  RandomMapSystem s0 = gibbs_system(m0);
  // K = 0, Z = 0, G = 1: f(s) = 1/sigma0 regardless of s.
  for (double s : {0.1, 1.0, 9.0}) {
    CHECK(s0.apply(NoiseDraw{{0.0, 1.0}}, s) ==
          doctest::Approx(1.0 / m0.sigma0).epsilon(1e-14));
  }

  // K = 1, ybar = 0: f(s) = G / (sigma0 + (J/2) Z^2 / (sJ + 1)).
  GibbsModel m1 = GibbsModel::from_stats(5, 1.0, 0.0, 5.0, 1);
  RandomMapSystem s1 = gibbs_system(m1);
  double z = 0.7, g = 2.0, s = 1.3;
  double expect = g / (5.0 + 2.5 * z * z / (s * 5.0 + 1.0));
  CHECK(s1.apply(NoiseDraw{{z, g}}, s) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("one-step total variation lemmas on a small grid") {
  const double grid[] = {0.1, 0.5, 1.0, 4.0};
  GibbsModel k1 = GibbsModel::builtin('A', 1);
  GibbsModel k0 = GibbsModel::builtin('B', 0);
  for (double x : grid) {
    for (double y : grid) {
      auto [l1, r1] = one_step_tv_check(k1, x, y);
      CHECK(l1 <= std::min(r1, 1.0) + 1e-6);
      auto [l0, r0] = one_step_tv_check(k0, x, y);
      CHECK(l0 <= std::min(r0, 1.0) + 1e-6);
      if (x == y) {
        CHECK(l1 == 0.0);
        CHECK(l0 == 0.0);
      }
    }
  }
  auto [lhs, rhs] = one_step_tv_check(k0, 1.0, 2.0);
  CHECK(rhs == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lhs <= 0.5 + 1e-6);

  auto [lhs1, rhs1] = one_step_tv_check(k1, 0.5, 0.6);
  CHECK(rhs1 == doctest::Approx(10.0 * 0.1 * (1.0 + 1.5 / std::sqrt(2.0 * M_PI)))
                    .epsilon(1e-12));
  CHECK(lhs1 <= 1.0 + 1e-6);
}

TEST_CASE("stationary small-set mass condition, K = 0") {
  GibbsModel b = GibbsModel::builtin('B', 0);
  std::vector<MassBound> rows = stationary_small_set_check(b, {0.1, 1.0});
  CHECK(rows[0].mass == doctest::Approx(0.014387677966970687).epsilon(1e-12));
  CHECK(rows[0].bound == doctest::Approx(0.1484131591025766).epsilon(1e-12));
  CHECK(rows[0].mass <= rows[0].bound);
  CHECK(rows[1].mass <= rows[1].bound);

  // mass / eps^q stays bounded as eps -> 0, approaching sigma0^q / q!.
  double ratio = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ratio = stationary_small_set_check(b, {eps})[0].mass / std::pow(eps, 3.0);
    CHECK(ratio <= std::exp(5.0));
  }
  CHECK(ratio == doctest::Approx(125.0 / 6.0).epsilon(1e-3));

  CHECK_THROWS_AS(stationary_small_set_check(GibbsModel::builtin('B', 1), {0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(stationary_small_set_check(b, {1.5}), std::invalid_argument);
}

TEST_CASE("transition density normalizes and matches simulation") {
  for (int K : {0, 1}) {
    GibbsModel m = GibbsModel::builtin('B', K);
    for (double x : {0.2, 1.0, 3.0}) {
      DensitySpec d = gibbs_transition_density(m, x);
      double mass = integrate(d.pdf, d.lo, d.hi);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
    // One forward step from x = 1 vs the marginalized kernel, KS at 1%.
    RandomMapSystem sys = gibbs_system(m);
    const std::size_t n = 100000;
    std::vector<double> draws(n);
    for (std::size_t i = 0; i < n; ++i) {
      draws[i] = forward_iterate(sys, 1.0, 1, RngStream(71, i)).states[1];
    }
    auto cdf = tabulated_cdf(gibbs_transition_density(m, 1.0));
    CHECK(ks_one_sample(draws, cdf) < ks_critical_one_sample(n, 0.01));
  }
}

TEST_CASE("the exact K = 0 stationary law is invariant under one step") {
  GibbsModel m = GibbsModel::builtin('C', 0);
  RandomMapSystem sys = gibbs_system(m);
  const std::size_t n = 100000;
  std::vector<double> stepped(n), fresh(n);
  parallel_replicas(n, 4, [&](std::size_t i) {
    RngStream rng(81, i);
    double x = sys.exact_stationary(rng, 1000);
    stepped[i] = sys.apply(sys.noise_sampler(rng, 1), x);
    fresh[i] = sys.exact_stationary(RngStream(82, i), 0);
  });
  CHECK(ks_two_sample(stepped, fresh) < ks_critical_two_sample(n, n, 0.01));
}

TEST_CASE("hard-coded Normal moment constants match Monte Carlo") {
  // The variant-i coefficient uses E[Z^2] = 1 and E[Z^4] = 3.
  const std::size_t n = 100000;
  RngStream rng(91, 0);
  double m2 = 0.0, m4 = 0.0, v2 = 0.0, v4 = 0.0;
  std::vector<double> z2(n), z4(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = normal_quantile(rng.uniform(i));
    z2[i] = z * z;
    z4[i] = z2[i] * z2[i];
  }
  m2 = sample_mean(z2);
  m4 = sample_mean(z4);
  v2 = sample_sd(z2) / std::sqrt(double(n));
  v4 = sample_sd(z4) / std::sqrt(double(n));
  CHECK(std::abs(m2 - 1.0) <= 3.0 * v2);
  CHECK(std::abs(m4 - 3.0) <= 3.0 * v4);
}
