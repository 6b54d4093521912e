#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mcb {

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS statistic against a CDF.
double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

// Large-sample critical value at significance level alpha (asymptotic
// Kolmogorov distribution), two-sample form with effective size nm/(n+m).
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha = 0.01);
double ks_critical_one_sample(std::size_t n, double alpha = 0.01);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x with homoskedastic
// standard errors. Requires n >= 3 for the SEs.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double sample_mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);  // n-1 denominator

}  // namespace mcb
