#include "drift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace mcb {

namespace {

std::size_t cell_index(const std::vector<Interval>& cells, double x) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (x >= cells[i].lo && x < cells[i].hi) return i;
  }
  throw std::invalid_argument("point " + std::to_string(x) +
                              " lies outside every partition cell");
}

std::vector<double> evaluation_grid(double lo, double hi, int n) {
  std::vector<double> g;
  g.reserve(n);
  if (std::isfinite(hi)) {
    for (int i = 0; i < n; ++i) {
      g.push_back(lo + (hi - lo) * (i + 0.5) / n);
    }
  } else {
    // Unbounded spaces get a logarithmic grid on (1e-3, 1e3).
    double a = std::max(lo, 1e-3), b = 1e3;
    for (int i = 0; i < n; ++i) {
      g.push_back(a * std::pow(b / a, (i + 0.5) / n));
    }
  }
  return g;
}

}  // namespace

double measure_integral(const MeasureSpec& mu, const std::function<double(double)>& f,
                        double clip_lo, double clip_hi,
                        const QuadratureSettings& settings) {
  double total = 0.0;
  if (mu.density) {
    double lo = std::max(mu.lo, clip_lo);
    double hi = std::min(mu.hi, clip_hi);
    if (lo < hi) {
      total += integrate([&](double x) { return f(x) * mu.density(x); }, lo, hi,
                         settings);
    }
  }
  for (const Atom& atom : mu.atoms) {
    if (atom.point >= clip_lo && atom.point < clip_hi) {
      total += atom.weight * f(atom.point);
    }
  }
  if (!std::isfinite(total)) throw NumericError("measure integral diverged");
  return total;
}

QMatrix build_q_matrix(const PartitionOperator& op, const QuadratureSettings& settings) {
  const std::size_t n = op.cells.size();
  if (n == 0 || op.measures.size() != n) {
    throw std::invalid_argument("partition operator needs one measure per cell");
  }
  QMatrix q;
  q.n = n;
  q.entries.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = measure_integral(op.measures[i], op.b, op.cells[j].lo,
                                  op.cells[j].hi, settings);
      if (v < 0.0) throw NumericError("negative Q-matrix entry");
      q.entries[i][j] = v;
    }
  }
  return q;
}

SubEigenResult find_sub_eigenvector(const QMatrix& q, double target_r) {
  if (target_r <= 0.0) throw std::invalid_argument("target rate must be positive");
  const std::size_t n = q.n;
  double max_row = 0.0;
  for (const auto& row : q.entries) {
    double s = 0.0;
    for (double v : row) s += v;
    max_row = std::max(max_row, s);
  }
  SubEigenResult out;
  if (max_row == 0.0) {
    out.feasible = true;
    out.certificate = {std::vector<double>(n, 1.0), target_r, 0.0};
    out.perron_root = 0.0;
    return out;
  }

  // Shifted power iteration: Q + cI is primitive on the dominant class even
  // when Q itself is periodic.
  const double shift = 0.1 * max_row;
  std::vector<double> v(n, 1.0), w(n, 0.0);
  double root = 0.0;
  bool converged = false;
  for (int it = 0; it < 100000; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = shift * v[i];
      for (std::size_t j = 0; j < n; ++j) s += q.entries[i][j] * v[j];
      w[i] = s;
      norm = std::max(norm, s);
    }
    double est = norm - shift;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    if (it > 2 && std::abs(est - root) <= 1e-12 * std::max(1.0, std::abs(est))) {
      root = est;
      converged = true;
      break;
    }
    root = est;
  }

  // Residual from the actual vector; for reducible matrices the iteration may
  // leave tiny components, so floor them to keep p strictly positive.
  double vmax = *std::max_element(v.begin(), v.end());
  for (double& vi : v) vi = std::max(vi, 1e-12 * vmax);
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += q.entries[i][j] * v[j];
    residual = std::max(residual, s / v[i]);
  }
  if (!converged) root = residual;  // conservative upper estimate

  out.perron_root = root;
  // Ties at the threshold resolve to infeasible.
  out.feasible = residual < target_r;
  if (out.feasible) out.certificate = {v, target_r, residual};
  return out;
}

std::function<double(double)> subeigenfunction_from_vector(
    const PartitionOperator& op, const SubEigenCertificate& cert) {
  if (cert.p.size() != op.cells.size()) {
    throw std::invalid_argument("certificate length does not match cell count");
  }
  auto cells = op.cells;
  auto p = cert.p;
  auto b = op.b;
  return [cells, p, b](double x) { return p[cell_index(cells, x)] * b(x); };
}

GridCheck grid_check_subeigen(const PartitionOperator& op,
                              const std::function<double(double)>& phi, double r,
                              int grid_points, const QuadratureSettings& settings) {
  // Fresh quadrature of int phi dmu_i, independent of any Q-matrix. phi is
  // only piecewise continuous, so integrate cell by cell.
  std::vector<double> integrals(op.cells.size(), 0.0);
  for (std::size_t i = 0; i < op.cells.size(); ++i) {
    for (const Interval& cell : op.cells) {
      integrals[i] +=
          measure_integral(op.measures[i], phi, cell.lo, cell.hi, settings);
    }
  }
  double lo = op.cells.front().lo, hi = op.cells.front().hi;
  for (const Interval& c : op.cells) {
    lo = std::min(lo, c.lo);
    hi = std::max(hi, c.hi);
  }
  GridCheck check;
  bool first = true;
  for (double x : evaluation_grid(lo, hi, grid_points)) {
    std::size_t i = cell_index(op.cells, x);
    double ratio = op.b(x) * integrals[i] / phi(x);
    if (first || ratio > check.max_ratio) {
      check.max_ratio = ratio;
      check.argmax = x;
      first = false;
    }
  }
  check.pass = check.max_ratio <= r + 1e-6;
  return check;
}

DriftFunction truncate_drift(const std::function<double(double)>& phi, double r,
                             double A0, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("truncation epsilon must be positive");
  double r_eps = r + epsilon * A0;
  if (r_eps >= 1.0) {
    throw std::invalid_argument("truncated rate " + std::to_string(r_eps) +
                                " reaches 1; choose a smaller epsilon");
  }
  DriftFunction out;
  out.phi = [phi, epsilon](double x) { return std::max(phi(x), epsilon) / epsilon; };
  out.rate = r_eps;
  out.description = "truncated at " + std::to_string(epsilon);
  return out;
}

std::function<double(double, double)> switch_operator(
    const std::function<double(double, double)>& kernel_density,
    const std::function<double(double)>& h) {
  return [kernel_density, h](double x, double y) {
    double hx = h(x);
    if (!(hx > 0.0)) throw NumericError("switch function vanishes at x");
    return kernel_density(x, y) * h(y) / hx;
  };
}

GrowthReport empirical_growth_rate(const RandomMapSystem& system,
                                   const DriftFunction& phi,
                                   const std::vector<double>& grid,
                                   std::size_t replicas, const RngStream& rng,
                                   int workers) {
  if (grid.empty()) throw std::invalid_argument("empirical_growth_rate: empty grid");
  GrowthReport report;
  report.per_point.assign(grid.size(), {});
  parallel_replicas(grid.size(), workers, [&](std::size_t g) {
    const double x = grid[g];
    if (!system.state_space.contains_open(x)) {
      throw std::invalid_argument("grid point outside the state space");
    }
    RngStream stream = rng.substream(g);
    const double phix = phi.phi(x);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = 0; k < replicas; ++k) {
      NoiseDraw d = system.noise_sampler(stream, k + 1);
      double fx = system.apply(d, x);
      double s = phi.phi(fx) * system.local_lipschitz(d, x) / phix;
      if (!std::isfinite(s)) {
        throw NumericError("non-finite growth summand at x=" + std::to_string(x));
      }
      sum += s;
      sumsq += s * s;
    }
    double mean = sum / replicas;
    double var = replicas > 1
                     ? std::max(0.0, (sumsq - replicas * mean * mean) / (replicas - 1))
                     : 0.0;
    report.per_point[g] = {x, mean, std::sqrt(var / replicas)};
  });
  bool first = true;
  for (const auto& pt : report.per_point) {
    if (first || pt.estimate > report.max_estimate) {
      report.max_estimate = pt.estimate;
      report.argmax = pt.x;
      first = false;
    }
  }
  return report;
}

std::string drift_certificate_json(const DriftCertificate& cert) {
  nlohmann::json j;
  j["phi_description"] = cert.phi_description;
  j["r"] = cert.r;
  j["epsilon"] = cert.epsilon;
  j["A0"] = cert.A0;
  j["r_epsilon"] = cert.r_epsilon;
  j["grid_check"] = {{"max_ratio", cert.grid_check.max_ratio},
                     {"argmax", cert.grid_check.argmax},
                     {"pass", cert.grid_check.pass}};
  return j.dump(2);
}

}  // namespace mcb
