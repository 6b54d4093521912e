#include "gibbs.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "samplers.hpp"

namespace mcb {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

void validate(const GibbsModel& m) {
  if (m.J < 1) throw std::invalid_argument("J must be a positive integer");
  if (m.alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  if (m.beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  if (m.K != 0 && m.K != 1) throw std::invalid_argument("K must be 0 or 1");
  if (!(m.sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
}

double gamma_shape(const GibbsModel& m) { return m.alpha + 0.5 * m.J; }

// Denominator of the precision update: sigma0 + (J/2) u^2 with
// u = ybar*K/d - z/sqrt(d), d = s*J + K.
double update_denominator(const GibbsModel& m, double z, double s) {
  double d = s * m.J + m.K;
  double u = m.y_bar * m.K / d - z / std::sqrt(d);
  return m.sigma0 + 0.5 * m.J * u * u;
}

}  // namespace

GibbsModel GibbsModel::from_stats(int J, double alpha, double y_bar, double sigma0,
                                  int K, double beta) {
  GibbsModel m{J, alpha, beta, K, y_bar, sigma0};
  validate(m);
  return m;
}

GibbsModel GibbsModel::builtin(char which, int K) {
  switch (which) {
    case 'A': return from_stats(10, 1.0, 1.5, 60.0, K);
    case 'B': return from_stats(5, 1.0, 0.5, 5.0, K);
    case 'C': return from_stats(5, 1.0, 1.0, 12.0, K);
    default: throw std::invalid_argument("unknown built-in case");
  }
}

GibbsModel ingest_data(const std::vector<double>& raw, double alpha, double beta,
                       double prior_precision_raw, double xi) {
  if (raw.empty()) throw std::invalid_argument("ingest_data: empty data");
  if (prior_precision_raw < 0.0) {
    throw std::invalid_argument("ingest_data: prior precision must be >= 0");
  }
  std::vector<double> y = raw;
  double beta_std = beta;
  int K = 0;
  if (prior_precision_raw > 0.0) {
    double s = std::sqrt(prior_precision_raw);
    for (double& v : y) v = (v - xi) * s;
    beta_std = prior_precision_raw * beta;
    K = 1;
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= y.size();
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  double sigma0 = beta_std + 0.5 * ss;
  if (!(sigma0 > 0.0)) {
    throw std::invalid_argument("ingest_data: all-equal data with zero beta give sigma0 = 0");
  }
  return GibbsModel::from_stats(static_cast<int>(y.size()), alpha, mean, sigma0, K,
                                beta_std);
}

RandomMapSystem gibbs_system(const GibbsModel& model) {
  validate(model);
  RandomMapSystem sys;
  sys.name = model.K == 0 ? "gibbs_k0" : "gibbs_k1";
  sys.state_space = {0.0, std::numeric_limits<double>::infinity()};
  sys.noise_dim = 2;
  const double shape = gamma_shape(model);
  sys.noise_sampler = [shape](const RngStream& rng, std::uint64_t t) {
    std::uint64_t c = (t - 1) * 2;
    NoiseDraw d;
    d.values = {normal_quantile(rng.uniform(c)),
                gamma_quantile(shape, rng.uniform(c + 1))};
    return d;
  };
  GibbsModel m = model;
  sys.apply = [m](const NoiseDraw& d, double s) {
    return d.values[1] / update_denominator(m, d.values[0], s);
  };
  sys.local_lipschitz = [m](const NoiseDraw& d, double s) {
    double z = d.values[0], g = d.values[1];
    double dd = s * m.J + m.K;
    double u = m.y_bar * m.K / dd - z / std::sqrt(dd);
    double du = m.y_bar * m.K / (dd * dd) - 0.5 * z / std::pow(dd, 1.5);
    double denom = m.sigma0 + 0.5 * m.J * u * u;
    return g * m.J * m.J * std::abs(u) * std::abs(du) / (denom * denom);
  };
  if (model.K == 0) {
    const double stat_shape = model.alpha + 0.5 * (model.J - 1);
    const double rate = model.sigma0;
    sys.exact_stationary = [stat_shape, rate](const RngStream& rng,
                                              std::uint64_t counter) {
      return gamma_quantile(stat_shape, rng.uniform(counter)) / rate;
    };
  }
  return sys;
}

GibbsConstants compute_constants(const GibbsModel& model, double epsilon) {
  validate(model);
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  GibbsConstants c;
  const double aJ = gamma_shape(model);
  const double yk = std::abs(model.y_bar) * std::sqrt(static_cast<double>(model.K));
  const double s0 = model.sigma0;

  c.A = aJ * (yk + 1.0) * (yk + 0.5) / (s0 * s0);
  c.has_r1 = aJ > 1.0;
  if (c.has_r1) {
    c.r1 = (yk + 1.0) * (yk + 0.5) / (aJ - 1.0);
    c.r1_eps = c.r1 + epsilon * c.A;
  }
  c.has_c1 = aJ > 2.0;

  if (model.K == 1) {
    const double ay = std::abs(model.y_bar);
    c.r2 = aJ * model.J * model.J * (ay + 1.0) * (ay + 0.5) / (s0 * s0);
    c.has_r2 = true;
    double t = model.J * aJ / s0;
    c.r3 = (4.0 * ay * (1.0 - 1.0 / std::sqrt(t + 1.0)) + std::log(t + 1.0)) / kSqrt2Pi;
    c.A_hat = (ay + 1.0) * aJ * model.J * kSqrt2Pi / (2.0 * s0 * s0);
    c.r3_eps = c.r3 + epsilon * c.A_hat;
    c.has_r3 = true;
  }

  if (model.K == 0) {
    c.q = model.alpha + 0.5 * (model.J - 1);
    c.B = std::exp(s0);
    c.eps0 = 1.0;
    c.w = (2.0 * model.alpha + model.J - 1.0) / (2.0 * model.alpha + model.J + 1.0);
    c.C_tilde = (model.alpha + 0.5 * (model.J + 1)) * std::exp((1.0 - c.w) * s0) *
                std::pow(2.0 * model.alpha + model.J - 1.0, -c.w);
    c.has_tv0 = true;
  }
  return c;
}

double BoundCurve::eval(int n) const {
  if (n < start_index) {
    throw std::invalid_argument("bound curve starts at n = " +
                                std::to_string(start_index));
  }
  return coefficient * std::pow(base, exponent_scale * n);
}

BoundCurve wasserstein_bound(const GibbsModel& model, WassersteinVariant variant,
                             double epsilon, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("start state must be positive");
  GibbsConstants c = compute_constants(model, epsilon);
  const double aJ = gamma_shape(model);
  const double s0 = model.sigma0;
  const double c2 = x + aJ / s0;

  double rate = 0.0, chat = 0.0;
  std::string tag;
  switch (variant) {
    case WassersteinVariant::I: {
      if (!c.has_r1 || !c.has_c1) {
        throw std::invalid_argument("variant i needs alpha + J/2 > 2");
      }
      rate = c.r1_eps;
      double d = x * model.J + model.K;
      double yk = model.y_bar * model.K;
      double moment =
          s0 * s0 + (model.J * s0 / d) * (yk * yk / d + 1.0) +
          (model.J * model.J / (4.0 * d * d)) *
              (std::pow(yk, 4) / (d * d) + 6.0 * yk * yk / d + 3.0);
      chat = c2 * (std::max(1.0 / (epsilon * x * x), 1.0) +
                   moment / (epsilon * (aJ - 1.0) * (aJ - 2.0)));
      tag = "variant i, eps=" + std::to_string(epsilon);
      break;
    }
    case WassersteinVariant::II: {
      if (!c.has_r2) throw std::invalid_argument("variant ii needs K = 1");
      rate = c.r2;
      chat = c2;
      tag = "variant ii";
      break;
    }
    case WassersteinVariant::III: {
      if (!c.has_r3) throw std::invalid_argument("variant iii needs K = 1");
      rate = c.r3_eps;
      chat = std::max(1.0, model.J * (2.0 * std::abs(model.y_bar) + 1.0) /
                               (epsilon * kSqrt2Pi)) *
             c2;
      tag = "variant iii, eps=" + std::to_string(epsilon);
      break;
    }
  }
  if (!(rate > 0.0 && rate < 1.0)) {
    throw std::invalid_argument("rate " + std::to_string(rate) +
                                " is not in (0,1); bound unavailable");
  }
  BoundCurve curve;
  curve.coefficient = chat / (1.0 - rate);
  curve.base = rate;
  curve.exponent_scale = 1.0;
  curve.start_index = 1;
  curve.derivation = "wasserstein " + tag + ", x=" + std::to_string(x);
  return curve;
}

BoundCurve tv_bound(const GibbsModel& model, const BoundCurve& wasserstein) {
  validate(model);
  BoundCurve curve;
  curve.base = wasserstein.base;
  curve.start_index = wasserstein.start_index + 1;
  if (model.K == 1) {
    double factor = 0.5 * model.J * (1.0 + std::abs(model.y_bar) / kSqrt2Pi);
    // factor * W(n-1) rewritten as coefficient * base^n.
    curve.coefficient = factor * wasserstein.coefficient / wasserstein.base;
    curve.exponent_scale = 1.0;
    curve.derivation = "tv from [" + wasserstein.derivation + "], K=1";
  } else {
    GibbsConstants c = compute_constants(model, 1.0);
    curve.coefficient =
        c.C_tilde * std::pow(wasserstein.coefficient / wasserstein.base, c.w);
    curve.exponent_scale = c.w;
    curve.derivation = "tv from [" + wasserstein.derivation + "], K=0";
  }
  return curve;
}

int first_n_below(const BoundCurve& curve, double target) {
  if (!(target > 0.0)) throw std::invalid_argument("target must be positive");
  double eff = std::pow(curve.base, curve.exponent_scale);
  if (!(eff < 1.0)) throw std::invalid_argument("curve does not decrease");
  for (int n = curve.start_index; n < 100000; ++n) {
    if (curve.coefficient * std::pow(eff, n) < target) return n;
  }
  throw NumericError("bound does not reach the target within 100000 steps");
}

double round_up_sigfigs(double v, int figs) {
  if (v <= 0.0) return v;
  double e = std::floor(std::log10(v));
  double scale = std::pow(10.0, e - figs + 1);
  // Guard so values already at the target precision are left unchanged.
  return std::ceil(v / scale - 1e-9) * scale;
}

int first_n_below_printed(const BoundCurve& curve, double target) {
  BoundCurve printed = curve;
  printed.coefficient = round_up_sigfigs(curve.coefficient, 3);
  printed.base = round_up_sigfigs(std::pow(curve.base, curve.exponent_scale), 3);
  printed.exponent_scale = 1.0;
  return first_n_below(printed, target);
}

DensitySpec gibbs_transition_density(const GibbsModel& model, double x) {
  validate(model);
  if (!(x > 0.0)) throw std::invalid_argument("state must be positive");
  const double shape = gamma_shape(model);
  // Marginalize Z over a fixed Gauss-Legendre grid on [-10, 10]; the Normal
  // mass outside is ~1.5e-23. Conditionally on Z the update is
  // Gamma(shape, rate c(Z)).
  using rule = boost::math::quadrature::gauss<double, 128>;
  std::vector<double> rates, logw;
  rates.reserve(256);
  logw.reserve(256);
  const auto& xs = rule::abscissa();  // non-negative half
  const auto& ws = rule::weights();
  const double half = 10.0;
  const double lg = lgamma_fn(shape);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (int sign = 0; sign < (xs[i] == 0.0 ? 1 : 2); ++sign) {
      double z = (sign == 0 ? 1.0 : -1.0) * xs[i] * half;
      double cz = update_denominator(model, z, x);
      rates.push_back(cz);
      logw.push_back(std::log(ws[i] * half * normal_pdf(z)) + shape * std::log(cz) - lg);
    }
  }
  DensitySpec spec;
  spec.lo = 0.0;
  spec.hi = gamma_quantile(shape, 1.0 - 1e-14) / model.sigma0;
  spec.normalization_tolerance = 1e-6;
  spec.pdf = [rates, logw, shape](double s) {
    if (s <= 0.0) return 0.0;
    double total = 0.0;
    double ls = std::log(s);
    for (std::size_t i = 0; i < rates.size(); ++i) {
      total += std::exp(logw[i] + (shape - 1.0) * ls - rates[i] * s);
    }
    return total;
  };
  return spec;
}

std::pair<double, double> one_step_tv_check(const GibbsModel& model, double x,
                                            double y,
                                            const QuadratureSettings& settings) {
  if (!(x > 0.0 && y > 0.0)) throw std::invalid_argument("states must be positive");
  double lhs = x == y ? 0.0
                      : tv_from_densities(gibbs_transition_density(model, x),
                                          gibbs_transition_density(model, y),
                                          settings);
  double rhs = model.K == 1
                   ? model.J * std::abs(x - y) * (1.0 + std::abs(model.y_bar) / kSqrt2Pi)
                   : std::abs(x - y) / std::max(x, y);
  if (lhs > std::min(rhs, 1.0) + 1e-6) {
    throw NumericError("one-step TV " + std::to_string(lhs) +
                       " exceeds its analytic bound " + std::to_string(rhs));
  }
  return {lhs, rhs};
}

std::vector<MassBound> stationary_small_set_check(const GibbsModel& model,
                                                  const std::vector<double>& epsilons) {
  validate(model);
  if (model.K != 0) {
    throw std::invalid_argument("small-set check requires K = 0");
  }
  const double q = model.alpha + 0.5 * (model.J - 1);
  std::vector<MassBound> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw std::invalid_argument("epsilon must lie in (0,1]");
    }
    MassBound mb;
    mb.epsilon = eps;
    mb.mass = gamma_cdf(q, model.sigma0 * eps);
    mb.bound = std::exp(model.sigma0) * std::pow(eps, q);
    if (mb.mass > mb.bound + 1e-12) {
      throw NumericError("stationary small-set mass exceeds its bound");
    }
    out.push_back(mb);
  }
  return out;
}

}  // namespace mcb
