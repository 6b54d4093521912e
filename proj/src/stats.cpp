#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcb {

namespace {

// Inverse of the Kolmogorov tail P(K > c) = 2 sum (-1)^{k+1} exp(-2 k^2 c^2),
// solved by bisection; alpha=0.01 gives c ~ 1.6276.
double kolmogorov_critical(double alpha) {
  auto tail = [](double c) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
      double term = 2.0 * std::exp(-2.0 * k * k * c * c);
      s += (k % 2 == 1) ? term : -term;
      if (term < 1e-16) break;
    }
    return s;
  };
  double lo = 0.3, hi = 4.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (tail(mid) > alpha) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_one_sample: empty input");
  std::sort(a.begin(), a.end());
  double d = 0.0;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double f = cdf(a[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
  double eff = static_cast<double>(n) * static_cast<double>(m) /
               static_cast<double>(n + m);
  return kolmogorov_critical(alpha) / std::sqrt(eff);
}

double ks_critical_one_sample(std::size_t n, double alpha) {
  return kolmogorov_critical(alpha) / std::sqrt(static_cast<double>(n));
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need >= 2 equal-length inputs");
  }
  const std::size_t n = x.size();
  double mx = sample_mean(x), my = sample_mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n >= 3) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = y[i] - fit.intercept - fit.slope * x[i];
      rss += e * e;
    }
    double s2 = rss / (n - 2);
    fit.slope_se = std::sqrt(s2 / sxx);
    double sx2 = 0.0;
    for (double v : x) sx2 += v * v;
    fit.intercept_se = std::sqrt(s2 * sx2 / (n * sxx));
  }
  return fit;
}

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("sample_mean: empty input");
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

}  // namespace mcb
