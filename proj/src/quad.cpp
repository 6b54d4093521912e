#include "quad.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "ifs.hpp"  // NumericError

namespace mcb {

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSettings& settings) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  double result = gauss_kronrod<double, 15>::integrate(
      f, lo, hi, settings.max_depth, settings.abs_tol, &error);
  if (!std::isfinite(result)) throw NumericError("quadrature produced a non-finite value");
  if (error > std::max(settings.abs_tol * 100.0, 1e-7 * std::abs(result)) &&
      error > 1e-6) {
    throw NumericError("quadrature did not converge (error estimate " +
                       std::to_string(error) + ")");
  }
  return result;
}

double integrate_singular(const std::function<double(double)>& f, double lo,
                          double hi, const QuadratureSettings& settings) {
  boost::math::quadrature::tanh_sinh<double> rule(15);
  double error = 0.0, l1 = 0.0;
  double result = rule.integrate(f, lo, hi, settings.abs_tol, &error, &l1);
  if (!std::isfinite(result)) throw NumericError("quadrature produced a non-finite value");
  return result;
}

double integrate_singular(const std::function<double(double, double)>& f,
                          double lo, double hi, const QuadratureSettings& settings) {
  boost::math::quadrature::tanh_sinh<double> rule(15);
  double error = 0.0, l1 = 0.0;
  auto g = [&f](double x, double xc) { return f(x, xc); };
  double result = rule.integrate(g, lo, hi, settings.abs_tol, &error, &l1);
  if (!std::isfinite(result)) throw NumericError("quadrature produced a non-finite value");
  return result;
}

}  // namespace mcb
