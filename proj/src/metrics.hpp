#pragma once

#include <functional>
#include <string>
#include <vector>

#include "quad.hpp"
#include "rng.hpp"

namespace mcb {

struct SampleSet {
  std::vector<double> values;
  bool sorted_flag = false;

  static SampleSet from(std::vector<double> v);
  void sort();
};

struct DensitySpec {
  std::function<double(double)> pdf;
  double lo;
  double hi;  // may be +infinity
  double normalization_tolerance = 1e-6;
};

enum class DistanceKind { Wasserstein, Tv };

struct EmpiricalDistance {
  double value = 0.0;
  std::size_t n_samples = 0;
  double std_error = 0.0;  // 0 when unavailable (single sample)
  DistanceKind kind = DistanceKind::Wasserstein;
};

// Exact W1 between two equal-size empirical measures: mean |a_(i) - b_(i)|
// over sorted order statistics. std_error from 200 bootstrap resamples.
EmpiricalDistance wasserstein1_empirical(const SampleSet& a, const SampleSet& b);

// Bootstrap-resamples the larger set down so both have min(|a|,|b|) points.
void equalize_sizes(SampleSet& a, SampleSet& b, const RngStream& rng);

// (1/2) int |p-q|, cross-checked against 1 - int min{p,q}; the two forms must
// agree within quadrature tolerance or a NumericError is thrown.
double tv_from_densities(const DensitySpec& p, const DensitySpec& q,
                         const QuadratureSettings& settings = {});

// Exact d_TV(Z/sqrt(a), Z/sqrt(b)) via the density crossing points.
// Postcondition: result <= |a-b|/max{a,b}.
double tv_scale_normal(double a, double b);

// Biased-upward diagnostic: (1/2) int |khat_a - khat_b| of Gaussian KDEs,
// evaluated on a shared binned grid. bandwidth <= 0 selects a Silverman-style
// rule from the pooled sample.
EmpiricalDistance tv_empirical_smoothed(const SampleSet& a, const SampleSet& b,
                                        double bandwidth = 0.0);

double silverman_bandwidth(const std::vector<double>& pooled);

}  // namespace mcb
