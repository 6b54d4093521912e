#pragma once

#include <functional>
#include <vector>

#include "ifs.hpp"
#include "metrics.hpp"
#include "quad.hpp"

namespace mcb {

struct LogisticModel {
  double a;  // noise law Beta(a+1/2, a-1/2) requires a > 1/2
};

struct LogisticConstants {
  double q = 0.0;         // = a
  double B = 0.0;         // small-set constant
  double eps0 = 0.0;      // = 1/(16a)
  double C_tilde_a = 0.0; // TV conversion constant (derived, not quoted)
  double K_a = 0.0;       // Beta(a+1/2, a-1/2) normalizer
  double K_tilde_a = 0.0; // Gamma(2a)/Gamma(a)^2
};

// State space (0,1); apply = 4Bx(1-x) with B ~ Beta(a+1/2, a-1/2) drawn at
// counter t-1. Exact stationary sampler: Beta(a,a).
RandomMapSystem logistic_system(const LogisticModel& model);

// Transition density p(x, z) = b(z/Q(x))/Q(x) on [0, Q(x)], Q(x) = 4x(1-x);
// zero outside. Integrable singularity at z = Q(x) when a < 3/2.
double logistic_transition_density(const LogisticModel& model, double x, double z);

// DensitySpec wrapper over the transition density from state x.
DensitySpec logistic_density_spec(const LogisticModel& model, double x);

// Total mass of the transition density from x, integrated with the edge
// singularity resolved to full precision. Should be 1 up to quadrature error.
double logistic_density_mass(const LogisticModel& model, double x,
                             const QuadratureSettings& settings = {});

// lhs = (1/2) int |p(x,.) - p(y,.)|; rhs = 8a|y-x|/max{Q(x),Q(y)}. Returns
// both sides without enforcing lhs <= rhs: the inequality fails for some
// state pairs when a < 3/2, and callers are expected to report that.
std::pair<double, double> lemma_logwass_check(const LogisticModel& model, double x,
                                              double y,
                                              const QuadratureSettings& settings = {});

LogisticConstants compute_logistic_constants(const LogisticModel& model);

// n |-> C_tilde_a * wasserstein_at(n-1)^(a/(a+1)), defined for n >= 1.
std::function<double(int)> tv_from_wasserstein_logistic(
    const LogisticModel& model, const std::function<double(int)>& wasserstein_at);

struct LogisticMassBound {
  double epsilon;
  double mass;   // stationary mass of {h <= epsilon} = 2 Beta(a,a)-CDF(8 a eps)
  double bound;  // B * eps^a
  bool holds;    // mass <= bound; a failure is reported, not suppressed
};

// Probes the small-set mass condition; epsilons must lie in (0, 1/(16a)].
std::vector<LogisticMassBound> small_set_mass_check(const LogisticModel& model,
                                                    const std::vector<double>& epsilons);

}  // namespace mcb
