#pragma once

#include <functional>

namespace mcb {

struct QuadratureSettings {
  double abs_tol = 1e-9;
  int max_depth = 18;
};

// Adaptive Gauss-Kronrod on a possibly infinite interval. Throws
// NumericError when the requested tolerance is not reached.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSettings& settings = {});

// tanh-sinh rule; tolerates integrable endpoint singularities such as the
// (Q-z)^{a-3/2} edge of the logistic transition density.
double integrate_singular(const std::function<double(double)>& f, double lo,
                          double hi, const QuadratureSettings& settings = {});

// tanh-sinh with the distance to the nearest endpoint passed as the second
// argument (positive, split at the interval midpoint). Lets the integrand
// resolve endpoint singularities closer than double rounding of x allows.
double integrate_singular(const std::function<double(double, double)>& f,
                          double lo, double hi,
                          const QuadratureSettings& settings = {});

}  // namespace mcb
