#pragma once

#include <string>
#include <vector>

#include "ifs.hpp"
#include "metrics.hpp"
#include "quad.hpp"

namespace mcb {

// One-dimensional precision recursion of the Normal mean/precision Gibbs
// sampler, after standardization to xi = 0 and K in {0,1}.
struct GibbsModel {
  int J;          // sample size
  double alpha;   // Gamma shape
  double beta;    // Gamma rate (already folded into sigma0)
  int K;          // prior precision, 0 or 1 after standardization
  double y_bar;   // data mean
  double sigma0;  // beta + (1/2) sum (Y_j - y_bar)^2

  static GibbsModel from_stats(int J, double alpha, double y_bar, double sigma0,
                               int K, double beta = 0.0);
  // Built-in parameter sets; which is 'A', 'B' or 'C'.
  static GibbsModel builtin(char which, int K);
};

// Standardizes raw data: for prior precision k > 0 the data are shifted by xi
// and scaled by sqrt(k), the Gamma rate becomes k*beta, and the stored model
// has K = 1; k = 0 passes through with K = 0.
GibbsModel ingest_data(const std::vector<double>& raw, double alpha, double beta,
                       double prior_precision_raw, double xi);

// Noise per step is (Z, G) with Z ~ N(0,1), G ~ Gamma(alpha + J/2, 1);
// counters (t-1)*2 and (t-1)*2+1. K = 0 registers the exact stationary
// sampler Gamma(alpha + (J-1)/2, sigma0).
RandomMapSystem gibbs_system(const GibbsModel& model);

struct GibbsConstants {
  // Drift-side constants; has_* records which parameter domain holds.
  double r1 = 0.0;      // rate for phi(x) = x^-2; needs alpha + J/2 > 1
  double A = 0.0;       // truncation slope for variant i
  double r1_eps = 0.0;  // r1 + eps*A
  double r2 = 0.0;      // rate for phi == 1 (K = 1 only)
  double r3 = 0.0;      // rate for phi = b (K = 1 only)
  double A_hat = 0.0;   // truncation slope for variant iii (K = 1 only)
  double r3_eps = 0.0;
  bool has_r1 = false;
  bool has_r2 = false;
  bool has_r3 = false;
  bool has_c1 = false;  // the variant-i coefficient needs alpha + J/2 > 2
  // TV-conversion constants for K = 0.
  double q = 0.0;     // alpha + (J-1)/2
  double B = 0.0;     // exp(sigma0)
  double eps0 = 1.0;
  double w = 0.0;     // (2 alpha + J - 1)/(2 alpha + J + 1)
  double C_tilde = 0.0;
  bool has_tv0 = false;
};

GibbsConstants compute_constants(const GibbsModel& model, double epsilon);

// bound(n) = coefficient * base^(exponent_scale * n) for n >= start_index.
struct BoundCurve {
  double coefficient = 0.0;
  double base = 0.0;
  double exponent_scale = 1.0;  // 1 for Wasserstein, w for K=0 TV curves
  int start_index = 1;
  std::string derivation;
  double eval(int n) const;
};

enum class WassersteinVariant { I, II, III };

// Geometric Wasserstein bound from start x; epsilon is the truncation level
// for variants i and iii and is ignored by variant ii.
BoundCurve wasserstein_bound(const GibbsModel& model, WassersteinVariant variant,
                             double epsilon, double x);

// TV curve derived from a Wasserstein curve: K=1 multiplies by
// (J/2)(1+|ybar|/sqrt(2 pi)) at n-1; K=0 raises to the power w with
// coefficient C_tilde.
BoundCurve tv_bound(const GibbsModel& model, const BoundCurve& wasserstein);

// Smallest n >= start_index with bound(n) < target.
int first_n_below(const BoundCurve& curve, double target);
// Same, after rounding the coefficient and the effective per-step base up to
// 3 significant figures (the precision used when curves are quoted).
int first_n_below_printed(const BoundCurve& curve, double target);

double round_up_sigfigs(double v, int figs);

// Transition density of one precision update from state x, with the noise
// pair marginalized numerically over Z.
DensitySpec gibbs_transition_density(const GibbsModel& model, double x);

// lhs = d_TV(P(x,.), P(y,.)) by quadrature; rhs = the analytic one-step
// bound (K=1: J|x-y|(1+|ybar|/sqrt(2 pi)); K=0: |x-y|/max{x,y}). Throws if
// lhs exceeds min{rhs, 1} beyond tolerance.
std::pair<double, double> one_step_tv_check(const GibbsModel& model, double x,
                                            double y,
                                            const QuadratureSettings& settings = {});

struct MassBound {
  double epsilon;
  double mass;   // stationary mass of [0, epsilon]
  double bound;  // exp(sigma0) * epsilon^q
};

// K = 0 only: checks the stationary small-set mass condition.
std::vector<MassBound> stationary_small_set_check(const GibbsModel& model,
                                                  const std::vector<double>& epsilons);

}  // namespace mcb
