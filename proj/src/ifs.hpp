#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace mcb {

class StateEscapeError : public std::runtime_error {
 public:
  StateEscapeError(const std::string& what, double state, int step)
      : std::runtime_error(what), state(state), step(step) {}
  double state;
  int step;
};

class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Realized randomness of one map application, e.g. (Z,G) for the Gibbs
// sampler or the single Beta draw of the logistic map.
struct NoiseDraw {
  std::vector<double> values;
};

struct Interval {
  double lo;
  double hi;  // may be +infinity
  bool contains_open(double x) const;
};

// A parametrized family of random maps f_w on an interval, with the
// information needed to simulate and to evaluate local contraction.
struct RandomMapSystem {
  std::string name;
  Interval state_space;
  int noise_dim = 1;
  // Samples the noise of map application t (1-based) from the stream.
  std::function<NoiseDraw(const RngStream&, std::uint64_t t)> noise_sampler;
  std::function<double(const NoiseDraw&, double)> apply;
  std::function<double(const NoiseDraw&, double)> local_lipschitz;  // |d/dx apply|
  // Present when the stationary law is known in closed form. Consumes one
  // uniform at the given counter.
  std::function<double(const RngStream&, std::uint64_t counter)> exact_stationary;
};

struct Trajectory {
  double start = 0.0;
  std::vector<double> states;  // states[0] == start
  std::uint64_t draws_used = 0;
};

Trajectory forward_iterate(const RandomMapSystem& system, double x0, int n,
                           const RngStream& rng);
double backward_iterate(const RandomMapSystem& system, double x0, int n,
                        const RngStream& rng);
std::pair<Trajectory, Trajectory> coupled_forward(const RandomMapSystem& system,
                                                  double x0, double y0, int n,
                                                  const RngStream& rng);

enum class StationaryMethod { Exact, Backward };

struct StationarySample {
  std::vector<double> values;
  bool converged = true;  // false for backward with zero burn-in
};

// method=Exact requires a registered exact sampler. Each sample i uses
// stream rng.substream(i), so sampling parallelizes and stays reproducible.
StationarySample sample_stationary(const RandomMapSystem& system,
                                   StationaryMethod method, int n_burn,
                                   std::size_t count, const RngStream& rng,
                                   int workers = 1);

// Runs f(replica) for replica in [0,count) on `workers` threads. Replicas
// are partitioned by index, so results are identical for any worker count.
void parallel_replicas(std::size_t count, int workers,
                       const std::function<void(std::size_t)>& f);

std::string trajectory_to_csv(const Trajectory& t);
std::string samples_to_csv(const std::vector<double>& values);
std::string trajectory_to_json(const RandomMapSystem& system, const Trajectory& t,
                               const RngStream& rng);
std::string samples_to_json(const RandomMapSystem& system,
                            const std::vector<double>& values, const RngStream& rng);

}  // namespace mcb
