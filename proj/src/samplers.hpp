#pragma once

namespace mcb {

// Inverse-CDF samplers. Every sampler consumes exactly one uniform, which
// keeps coupled chains aligned on a shared draw sequence.
double normal_quantile(double u);
double gamma_quantile(double shape, double u);   // unit rate
double beta_quantile(double a, double b, double u);

double normal_cdf(double x);
double normal_pdf(double x);
double gamma_cdf(double shape, double x);        // unit rate, regularized P
double beta_cdf(double a, double b, double x);
double lgamma_fn(double x);

}  // namespace mcb
