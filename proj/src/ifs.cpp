#include "ifs.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace mcb {

namespace {

constexpr double kBoundaryMargin = 1e-300;

void check_state(const Interval& space, double x, int step) {
  if (!std::isfinite(x)) {
    throw NumericError("non-finite state at step " + std::to_string(step));
  }
  bool ok = x > space.lo && x < space.hi;
  if (ok && (x - space.lo) < kBoundaryMargin) ok = false;
  if (ok && std::isfinite(space.hi) && (space.hi - x) < kBoundaryMargin) ok = false;
  if (!ok) {
    throw StateEscapeError("state escaped the state space at step " +
                               std::to_string(step) + " (value " +
                               std::to_string(x) + ")",
                           x, step);
  }
}

NoiseDraw draw_at(const RandomMapSystem& system, const RngStream& rng,
                  std::uint64_t t) {
  NoiseDraw d = system.noise_sampler(rng, t);
  if (static_cast<int>(d.values.size()) != system.noise_dim) {
    throw NumericError("noise draw has wrong dimension");
  }
  return d;
}

}  // namespace

bool Interval::contains_open(double x) const { return x > lo && x < hi; }

Trajectory forward_iterate(const RandomMapSystem& system, double x0, int n,
                           const RngStream& rng) {
  if (n < 0) throw std::invalid_argument("forward_iterate: n must be >= 0");
  check_state(system.state_space, x0, 0);
  Trajectory traj;
  traj.start = x0;
  traj.states.reserve(static_cast<std::size_t>(n) + 1);
  traj.states.push_back(x0);
  double s = x0;
  for (int t = 1; t <= n; ++t) {
    s = system.apply(draw_at(system, rng, static_cast<std::uint64_t>(t)), s);
    check_state(system.state_space, s, t);
    traj.states.push_back(s);
  }
  traj.draws_used = static_cast<std::uint64_t>(n);
  return traj;
}

double backward_iterate(const RandomMapSystem& system, double x0, int n,
                        const RngStream& rng) {
  if (n < 0) throw std::invalid_argument("backward_iterate: n must be >= 0");
  check_state(system.state_space, x0, 0);
  double s = x0;
  // F_n(x) = f_1 o f_2 o ... o f_n(x): draw index n is applied first.
  for (int t = n; t >= 1; --t) {
    s = system.apply(draw_at(system, rng, static_cast<std::uint64_t>(t)), s);
    check_state(system.state_space, s, t);
  }
  return s;
}

std::pair<Trajectory, Trajectory> coupled_forward(const RandomMapSystem& system,
                                                  double x0, double y0, int n,
                                                  const RngStream& rng) {
  if (n < 0) throw std::invalid_argument("coupled_forward: n must be >= 0");
  check_state(system.state_space, x0, 0);
  check_state(system.state_space, y0, 0);
  Trajectory a, b;
  a.start = x0;
  b.start = y0;
  a.states.push_back(x0);
  b.states.push_back(y0);
  double s = x0, u = y0;
  for (int t = 1; t <= n; ++t) {
    NoiseDraw d = draw_at(system, rng, static_cast<std::uint64_t>(t));
    s = system.apply(d, s);
    u = system.apply(d, u);
    check_state(system.state_space, s, t);
    check_state(system.state_space, u, t);
    a.states.push_back(s);
    b.states.push_back(u);
  }
  a.draws_used = b.draws_used = static_cast<std::uint64_t>(n);
  return {std::move(a), std::move(b)};
}

void parallel_replicas(std::size_t count, int workers,
                       const std::function<void(std::size_t)>& f) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  pool.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < count; i += w) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

StationarySample sample_stationary(const RandomMapSystem& system,
                                   StationaryMethod method, int n_burn,
                                   std::size_t count, const RngStream& rng,
                                   int workers) {
  StationarySample out;
  out.values.assign(count, 0.0);
  if (method == StationaryMethod::Exact) {
    if (!system.exact_stationary) {
      throw std::invalid_argument("sample_stationary: no exact sampler registered for " +
                                  system.name);
    }
    parallel_replicas(count, workers, [&](std::size_t i) {
      out.values[i] = system.exact_stationary(rng.substream(i), 0);
    });
  } else {
    if (n_burn < 0) throw std::invalid_argument("sample_stationary: n_burn must be >= 0");
    if (n_burn == 0) {
      out.converged = false;
      // Zero burn-in returns the start state; pick midpoint-ish reference.
    }
    parallel_replicas(count, workers, [&](std::size_t i) {
      double lo = system.state_space.lo;
      double hi = system.state_space.hi;
      double x0 = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
      out.values[i] = backward_iterate(system, x0, n_burn, rng.substream(i));
    });
  }
  return out;
}

std::string trajectory_to_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  os << "t,state\n";
  for (std::size_t i = 0; i < t.states.size(); ++i) os << i << "," << t.states[i] << "\n";
  return os.str();
}

std::string samples_to_csv(const std::vector<double>& values) {
  std::ostringstream os;
  os.precision(17);
  os << "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) os << i << "," << values[i] << "\n";
  return os.str();
}

std::string trajectory_to_json(const RandomMapSystem& system, const Trajectory& t,
                               const RngStream& rng) {
  nlohmann::json j;
  j["system"] = system.name;
  j["params"] = {{"state_space", {system.state_space.lo, system.state_space.hi}},
                 {"noise_dim", system.noise_dim}};
  j["seed"] = rng.seed();
  j["stream_id"] = rng.stream_id();
  j["data"] = t.states;
  return j.dump();
}

std::string samples_to_json(const RandomMapSystem& system,
                            const std::vector<double>& values, const RngStream& rng) {
  nlohmann::json j;
  j["system"] = system.name;
  j["params"] = {{"state_space", {system.state_space.lo, system.state_space.hi}},
                 {"noise_dim", system.noise_dim}};
  j["seed"] = rng.seed();
  j["stream_id"] = rng.stream_id();
  j["data"] = values;
  return j.dump();
}

}  // namespace mcb
