#include "samplers.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace mcb {

double normal_quantile(double u) {
  static const boost::math::normal_distribution<double> n01;
  return boost::math::quantile(n01, u);
}

double gamma_quantile(double shape, double u) {
  if (shape <= 0.0) throw std::domain_error("gamma_quantile: shape must be positive");
  return boost::math::gamma_p_inv(shape, u);
}

double beta_quantile(double a, double b, double u) {
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("beta_quantile: parameters must be positive");
  return boost::math::ibeta_inv(a, b, u);
}

double normal_cdf(double x) {
  static const boost::math::normal_distribution<double> n01;
  return boost::math::cdf(n01, x);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * 0.3989422804014326779;
}

double gamma_cdf(double shape, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x);
}

double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double lgamma_fn(double x) { return boost::math::lgamma(x); }

}  // namespace mcb
