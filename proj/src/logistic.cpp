#include "logistic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "samplers.hpp"

namespace mcb {

namespace {

void validate(const LogisticModel& m) {
  if (!(m.a > 0.5)) throw std::invalid_argument("shape a must exceed 1/2");
}

double q_of(double x) { return 4.0 * x * (1.0 - x); }

// Beta(a+1/2, a-1/2) log-normalizer.
double noise_log_norm(double a) {
  return lgamma_fn(2.0 * a) - lgamma_fn(a + 0.5) - lgamma_fn(a - 0.5);
}

// Density on support (0, q) with the gap q - z supplied directly, so the
// (1-u)^{a-3/2} factor keeps full precision arbitrarily close to the edge.
double density_from_gap(double a, double q, double z, double gap) {
  if (!(z > 0.0) || !(gap > 0.0)) return 0.0;
  return std::exp(noise_log_norm(a) + (a - 0.5) * std::log(z / q) +
                  (a - 1.5) * std::log(gap / q)) /
         q;
}

}  // namespace

RandomMapSystem logistic_system(const LogisticModel& model) {
  validate(model);
  RandomMapSystem sys;
  sys.name = "logistic";
  sys.state_space = {0.0, 1.0};
  sys.noise_dim = 1;
  const double a = model.a;
  sys.noise_sampler = [a](const RngStream& rng, std::uint64_t t) {
    NoiseDraw d;
    d.values = {beta_quantile(a + 0.5, a - 0.5, rng.uniform(t - 1))};
    return d;
  };
  sys.apply = [](const NoiseDraw& d, double x) {
    return d.values[0] * q_of(x);
  };
  sys.local_lipschitz = [](const NoiseDraw& d, double x) {
    return 4.0 * d.values[0] * std::abs(1.0 - 2.0 * x);
  };
  sys.exact_stationary = [a](const RngStream& rng, std::uint64_t counter) {
    return beta_quantile(a, a, rng.uniform(counter));
  };
  return sys;
}

double logistic_transition_density(const LogisticModel& model, double x, double z) {
  validate(model);
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("state outside (0,1)");
  double q = q_of(x);
  if (z <= 0.0 || z >= q) return 0.0;
  double u = z / q;
  double a = model.a;
  return std::exp(noise_log_norm(a) + (a - 0.5) * std::log(u) +
                  (a - 1.5) * std::log(1.0 - u)) /
         q;
}

DensitySpec logistic_density_spec(const LogisticModel& model, double x) {
  DensitySpec spec;
  spec.lo = 0.0;
  spec.hi = q_of(x);
  spec.normalization_tolerance = 1e-6;
  LogisticModel m = model;
  spec.pdf = [m, x](double z) { return logistic_transition_density(m, x, z); };
  return spec;
}

double logistic_density_mass(const LogisticModel& model, double x,
                             const QuadratureSettings& settings) {
  validate(model);
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("state outside (0,1)");
  const double a = model.a, q = q_of(x);
  return integrate_singular(
      [a, q](double z, double zc) {
        double gap = z > 0.5 * q ? zc : q - z;
        return density_from_gap(a, q, z, gap);
      },
      0.0, q, settings);
}

std::pair<double, double> lemma_logwass_check(const LogisticModel& model, double x,
                                              double y,
                                              const QuadratureSettings& settings) {
  validate(model);
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0)) {
    throw std::invalid_argument("states outside (0,1)");
  }
  const double a = model.a;
  double qx = q_of(x), qy = q_of(y);
  double q1 = std::min(qx, qy), q2 = std::max(qx, qy);
  double rhs = 8.0 * a * std::abs(y - x) / q2;
  double lhs = 0.0;
  if (q1 != q2) {
    // Split at the smaller support edge. Each panel ends at a density
    // singularity when a < 3/2; the edge gaps come from the quadrature's
    // endpoint distance so they never round to zero.
    double inner = integrate_singular(
        [&](double z, double zc) {
          double gap1 = z > 0.5 * q1 ? zc : q1 - z;
          return std::abs(density_from_gap(a, q1, z, gap1) -
                          density_from_gap(a, q2, z, q2 - z));
        },
        0.0, q1, settings);
    double outer = integrate_singular(
        [&](double z, double zc) {
          double gap = z > 0.5 * (q1 + q2) ? zc : q2 - z;
          return density_from_gap(a, q2, z, gap);
        },
        q1, q2, settings);
    lhs = 0.5 * (inner + outer);
  }
  // No bound enforcement here: the claimed inequality genuinely fails for
  // some a < 3/2 state pairs, and callers must be able to observe that.
  return {lhs, rhs};
}

LogisticConstants compute_logistic_constants(const LogisticModel& model) {
  validate(model);
  const double a = model.a;
  LogisticConstants c;
  c.q = a;
  c.eps0 = 1.0 / (16.0 * a);
  c.K_tilde_a = std::exp(lgamma_fn(2.0 * a) - 2.0 * lgamma_fn(a));
  c.K_a = std::exp(noise_log_norm(a));
  c.B = a >= 1.0 ? c.K_tilde_a * std::pow(8.0, a) * std::pow(a, a - 1.0)
                 : 2.0 * c.K_tilde_a * std::pow(4.0, a) * std::pow(a, a - 1.0);
  double expo = c.q / (1.0 + c.q);
  c.C_tilde_a = std::pow(2.0 * c.q, -expo) *
                std::max((c.q + 1.0) * std::pow(c.B, 1.0 / (1.0 + c.q)),
                         std::pow(std::pow(c.B, c.q) * c.eps0, -1.0 / (1.0 + c.q)));
  return c;
}

std::function<double(int)> tv_from_wasserstein_logistic(
    const LogisticModel& model, const std::function<double(int)>& wasserstein_at) {
  LogisticConstants c = compute_logistic_constants(model);
  double expo = model.a / (model.a + 1.0);
  double coef = c.C_tilde_a;
  return [coef, expo, wasserstein_at](int n) {
    if (n < 1) throw std::invalid_argument("TV curve is defined for n >= 1");
    return coef * std::pow(wasserstein_at(n - 1), expo);
  };
}

std::vector<LogisticMassBound> small_set_mass_check(
    const LogisticModel& model, const std::vector<double>& epsilons) {
  LogisticConstants c = compute_logistic_constants(model);
  std::vector<LogisticMassBound> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= c.eps0)) {
      throw std::invalid_argument("epsilon must lie in (0, 1/(16a)]");
    }
    LogisticMassBound mb;
    mb.epsilon = eps;
    mb.mass = 2.0 * beta_cdf(model.a, model.a, 8.0 * model.a * eps);
    mb.bound = c.B * std::pow(eps, model.a);
    mb.holds = mb.mass <= mb.bound + 1e-12;
    out.push_back(mb);
  }
  return out;
}

}  // namespace mcb
