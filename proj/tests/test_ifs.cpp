#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gibbs.hpp"
#include "ifs.hpp"
#include "json.hpp"
#include "logistic.hpp"
#include "stats.hpp"

using namespace mcb;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("forward iteration basics") {
  RandomMapSystem sys = logistic_system({2.0});
  RngStream rng(1, 0);

  Trajectory t0 = forward_iterate(sys, 0.5, 0, rng);
  CHECK(t0.states == std::vector<double>{0.5});
  CHECK(t0.draws_used == 0);

  Trajectory t5 = forward_iterate(sys, 0.5, 5, rng);
  CHECK(t5.states.size() == 6);
  CHECK(t5.states[0] == 0.5);
  for (double s : t5.states) CHECK(sys.state_space.contains_open(s));
}

TEST_CASE("fixed draws pin the map values") {
  // Logistic with B = 1: 4*1*x(1-x) at x = 0.5 lands exactly on 1.0.
  RandomMapSystem log_sys = logistic_system({2.0});
  NoiseDraw b_one{{1.0}};
  CHECK(log_sys.apply(b_one, 0.5) == 1.0);
  // 1.0 is a boundary point, so iterating from there must signal escape.
  RandomMapSystem degenerate = log_sys;
  degenerate.noise_sampler = [](const RngStream&, std::uint64_t) {
    return NoiseDraw{{1.0}};
  };
  RngStream rng(1, 0);
  CHECK_THROWS_AS(forward_iterate(degenerate, 0.5, 2, rng), StateEscapeError);

  // Gibbs K = 0 with Z = 0: the update is G / sigma0, independent of state.
  GibbsModel m = GibbsModel::builtin('B', 0);
  RandomMapSystem gsys = gibbs_system(m);
  for (double g : {0.3, 1.0, 4.0}) {
    NoiseDraw d{{0.0, g}};
    CHECK(gsys.apply(d, 0.1) == doctest::Approx(g / m.sigma0).epsilon(1e-14));
    CHECK(gsys.apply(d, 7.0) == doctest::Approx(g / m.sigma0).epsilon(1e-14));
  }
}

TEST_CASE("backward iteration composes in reverse draw order") {
  RandomMapSystem sys = gibbs_system(GibbsModel::builtin('A', 1));
  RngStream rng(42, 7);
  CHECK(backward_iterate(sys, 2.5, 0, rng) == 2.5);
  // n = 1: a single map, identical to the forward step.
  Trajectory fwd = forward_iterate(sys, 2.5, 1, rng);
  CHECK(backward_iterate(sys, 2.5, 1, rng) == fwd.states[1]);
}

TEST_CASE("determinism across repeated runs and worker counts") {
  RandomMapSystem sys = gibbs_system(GibbsModel::builtin('C', 1));
  RngStream rng(99, 3);
  Trajectory a = forward_iterate(sys, 1.0, 50, rng);
  Trajectory b = forward_iterate(sys, 1.0, 50, rng);
  CHECK(a.states == b.states);

  RandomMapSystem k0 = gibbs_system(GibbsModel::builtin('A', 0));
  StationarySample s1 = sample_stationary(k0, StationaryMethod::Exact, 0, 5000,
                                          RngStream(5, 0), 1);
  StationarySample s4 = sample_stationary(k0, StationaryMethod::Exact, 0, 5000,
                                          RngStream(5, 0), 4);
  CHECK(s1.values == s4.values);
}

TEST_CASE("local Lipschitz factor agrees with finite differences") {
  struct Case {
    RandomMapSystem sys;
    double lo, hi;
  };
  std::vector<Case> cases;
  cases.push_back({gibbs_system(GibbsModel::builtin('A', 0)), 0.05, 5.0});
  cases.push_back({gibbs_system(GibbsModel::builtin('B', 1)), 0.05, 5.0});
  cases.push_back({logistic_system({2.0}), 0.05, 0.95});
  RngStream rng(123, 0);
  std::uint64_t c = 0;
  for (const Case& tc : cases) {
    for (int k = 0; k < 100; ++k) {
      double x = tc.lo + (tc.hi - tc.lo) * rng.uniform(c++);
      NoiseDraw d = tc.sys.noise_sampler(rng.substream(1000 + k), 1);
      double h = 1e-6 * (1.0 + std::abs(x));
      double fd =
          (tc.sys.apply(d, x + h) - tc.sys.apply(d, x - h)) / (2.0 * h);
      double lip = tc.sys.local_lipschitz(d, x);
      CHECK(std::abs(std::abs(fd) - lip) <= 1e-6 * (1.0 + lip));
    }
  }
}

TEST_CASE("forward and backward endpoints agree in distribution") {
  std::vector<RandomMapSystem> systems = {
      gibbs_system(GibbsModel::builtin('A', 0)),
      gibbs_system(GibbsModel::builtin('A', 1)), logistic_system({2.0})};
  const std::size_t n_rep = 10000;
  for (const RandomMapSystem& sys : systems) {
    double x0 = std::isfinite(sys.state_space.hi) ? 0.5 : 1.0;
    for (int n : {1, 5, 20}) {
      std::vector<double> fwd(n_rep), bwd(n_rep);
      RngStream rng(2024, 0);
      for (std::size_t i = 0; i < n_rep; ++i) {
        fwd[i] = forward_iterate(sys, x0, n, rng.substream(i)).states.back();
        bwd[i] = backward_iterate(sys, x0, n, rng.substream(n_rep + i));
      }
      double ks = ks_two_sample(fwd, bwd);
      CHECK(ks < ks_critical_two_sample(n_rep, n_rep, 0.01));
    }
  }
}

TEST_CASE("backward iteration is attractive for the Gibbs K=0 chain") {
  RandomMapSystem sys = gibbs_system(GibbsModel::builtin('A', 0));
  const std::size_t n_rep = 10000;
  std::size_t close = 0;
  for (std::size_t i = 0; i < n_rep; ++i) {
    RngStream rng(7, i);
    double a = backward_iterate(sys, 0.5, 50, rng);
    double b = backward_iterate(sys, 5.0, 50, rng);
    if (std::abs(a - b) < 1e-6) ++close;
  }
  CHECK(close >= n_rep * 99 / 100);
}

TEST_CASE("coupled trajectories share their noise") {
  RandomMapSystem sys = gibbs_system(GibbsModel::builtin('B', 1));
  RngStream rng(11, 0);
  auto [a, b] = coupled_forward(sys, 1.0, 1.0, 30, rng);
  CHECK(a.states == b.states);

  // Logistic a = 2 contracts: mean coupled gap at n = 100 is tiny.
  RandomMapSystem log_sys = logistic_system({2.0});
  const std::size_t n_rep = 10000;
  double gap = 0.0;
  for (std::size_t i = 0; i < n_rep; ++i) {
    auto [u, v] = coupled_forward(log_sys, 0.3, 0.7, 100, RngStream(13, i));
    gap += std::abs(u.states.back() - v.states.back());
  }
  CHECK(gap / n_rep < 1e-3);
}

TEST_CASE("coupled gap decreases with n for the Gibbs K=0 chain") {
  RandomMapSystem sys = gibbs_system(GibbsModel::builtin('B', 0));
  const std::size_t n_rep = 10000;
  const std::vector<int> ns = {1, 2, 5, 10, 20};
  std::vector<std::vector<double>> gaps(ns.size(), std::vector<double>(n_rep));
  for (std::size_t i = 0; i < n_rep; ++i) {
    auto [a, b] = coupled_forward(sys, 0.2, 5.0, ns.back(), RngStream(17, i));
    for (std::size_t k = 0; k < ns.size(); ++k) {
      gaps[k][i] = std::abs(a.states[ns[k]] - b.states[ns[k]]);
    }
  }
  double prev = median(gaps[0]);
  for (std::size_t k = 1; k < ns.size(); ++k) {
    double cur = median(gaps[k]);
    // Non-increasing within generous Monte Carlo slack.
    CHECK(cur <= prev * (1.0 + 1e-6) + 2.0 / std::sqrt(double(n_rep)));
    prev = cur;
  }
}

TEST_CASE("stationary sampling") {
  RandomMapSystem uni = logistic_system({1.0});
  StationarySample s =
      sample_stationary(uni, StationaryMethod::Exact, 0, 20000, RngStream(3, 0), 4);
  double mean = sample_mean(s.values);
  double se = sample_sd(s.values) / std::sqrt(double(s.values.size()));
  CHECK(std::abs(mean - 0.5) <= 3.0 * se);

  GibbsModel m = GibbsModel::builtin('B', 0);
  RandomMapSystem gsys = gibbs_system(m);
  StationarySample g =
      sample_stationary(gsys, StationaryMethod::Exact, 0, 20000, RngStream(3, 1), 4);
  double target = (m.alpha + 0.5 * (m.J - 1)) / m.sigma0;
  double gse = sample_sd(g.values) / std::sqrt(double(g.values.size()));
  CHECK(std::abs(sample_mean(g.values) - target) <= 3.0 * gse);

  // Backward burn-in: zero steps returns the start state, flagged unconverged.
  StationarySample b0 =
      sample_stationary(gsys, StationaryMethod::Backward, 0, 10, RngStream(3, 2), 1);
  CHECK_FALSE(b0.converged);
  for (double v : b0.values) CHECK(v == b0.values[0]);

  // Burned-in backward samples match the exact law.
  StationarySample b =
      sample_stationary(gsys, StationaryMethod::Backward, 200, 5000, RngStream(3, 3), 4);
  CHECK(b.converged);
  StationarySample e =
      sample_stationary(gsys, StationaryMethod::Exact, 0, 5000, RngStream(3, 4), 4);
  CHECK(ks_two_sample(b.values, e.values) < ks_critical_two_sample(5000, 5000, 0.01));

  CHECK_THROWS_AS(
      sample_stationary(gibbs_system(GibbsModel::builtin('A', 1)),
                        StationaryMethod::Exact, 0, 1, RngStream(0, 0), 1),
      std::invalid_argument);
}

TEST_CASE("serialization round trip") {
  RandomMapSystem sys = logistic_system({2.0});
  RngStream rng(21, 4);
  Trajectory t = forward_iterate(sys, 0.5, 5, rng);

  std::string csv = trajectory_to_csv(t);
  // Header plus one row per state, values recoverable at full precision.
  std::vector<double> parsed;
  std::size_t pos = csv.find('\n') + 1;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    std::size_t eol = csv.find('\n', pos);
    parsed.push_back(std::stod(csv.substr(comma + 1, eol - comma - 1)));
    pos = eol + 1;
  }
  CHECK(parsed == t.states);

  nlohmann::json j = nlohmann::json::parse(trajectory_to_json(sys, t, rng));
  CHECK(j["system"] == "logistic");
  CHECK(j["seed"] == 21);
  CHECK(j["stream_id"] == 4);
  CHECK(j["data"].get<std::vector<double>>() == t.states);

  nlohmann::json js = nlohmann::json::parse(samples_to_json(sys, t.states, rng));
  CHECK(js["data"].get<std::vector<double>>() == t.states);
}
