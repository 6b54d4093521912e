#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ifs.hpp"
#include "quad.hpp"

namespace mcb {

struct DriftFunction {
  std::function<double(double)> phi;  // >= 1 on the state space
  double rate;                        // in (0,1)
  std::string description;
};

struct Atom {
  double point;
  double weight;
};

// A finite measure given by a density against Lebesgue on [lo,hi] plus
// optional atoms. Either part may be absent.
struct MeasureSpec {
  std::function<double(double)> density;  // may be null
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Atom> atoms;
};

// Operator Lf(x) = b(x) sum_i 1_{A_i}(x) int f dmu_i on a cell partition.
struct PartitionOperator {
  std::function<double(double)> b;  // positive
  std::vector<Interval> cells;      // disjoint, covering the state space
  std::vector<MeasureSpec> measures;
};

struct QMatrix {
  std::vector<std::vector<double>> entries;  // entries[i][j] = int_{A_j} b dmu_i
  std::size_t n = 0;
};

struct SubEigenCertificate {
  std::vector<double> p;  // strictly positive
  double r = 0.0;
  double residual = 0.0;  // max_i (Qp)_i / p_i, <= r when feasible
};

struct SubEigenResult {
  bool feasible = false;
  SubEigenCertificate certificate;  // valid when feasible
  double perron_root = 0.0;         // witness either way
};

// int f dmu over the part of [clip_lo, clip_hi] that carries the measure.
double measure_integral(const MeasureSpec& mu, const std::function<double(double)>& f,
                        double clip_lo, double clip_hi,
                        const QuadratureSettings& settings = {});

QMatrix build_q_matrix(const PartitionOperator& op,
                       const QuadratureSettings& settings = {});

// Power iteration for the Perron root of Q >= 0 (relative tolerance 1e-12).
// Feasible iff root <= target_r; a tie at the threshold within tolerance is
// resolved to infeasible, so certificates never overstate.
SubEigenResult find_sub_eigenvector(const QMatrix& q, double target_r);

// phi(x) = p_{cell(x)} * b(x). Throws if x is outside every cell.
std::function<double(double)> subeigenfunction_from_vector(
    const PartitionOperator& op, const SubEigenCertificate& cert);

struct GridCheck {
  double max_ratio = 0.0;  // max over the grid of L phi(x) / phi(x)
  double argmax = 0.0;
  bool pass = false;       // max_ratio <= r + 1e-6
};

// Independently re-evaluates L phi(x) by quadrature on an evaluation grid.
GridCheck grid_check_subeigen(const PartitionOperator& op,
                              const std::function<double(double)>& phi, double r,
                              int grid_points = 200,
                              const QuadratureSettings& settings = {});

// phi_eps(x) = max{phi(x), eps}/eps with rate r + eps*A0. A0 is the caller's
// analytic bound on sup_x E[D_x f]/phi(x). Throws if the rate reaches 1.
DriftFunction truncate_drift(const std::function<double(double)>& phi, double r,
                             double A0, double epsilon);

// Kernel conjugation k(x,y) -> k(x,y) h(y)/h(x).
std::function<double(double, double)> switch_operator(
    const std::function<double(double, double)>& kernel_density,
    const std::function<double(double)>& h);

struct GrowthEstimate {
  double x = 0.0;
  double estimate = 0.0;  // Monte Carlo E[phi(f(x)) D_x f / phi(x)]
  double std_error = 0.0;
};

struct GrowthReport {
  std::vector<GrowthEstimate> per_point;
  double max_estimate = 0.0;
  double argmax = 0.0;
};

GrowthReport empirical_growth_rate(const RandomMapSystem& system,
                                   const DriftFunction& phi,
                                   const std::vector<double>& grid,
                                   std::size_t replicas, const RngStream& rng,
                                   int workers = 1);

struct DriftCertificate {
  std::string phi_description;
  double r = 0.0;
  double epsilon = 0.0;
  double A0 = 0.0;
  double r_epsilon = 0.0;
  GridCheck grid_check;
};

std::string drift_certificate_json(const DriftCertificate& cert);

}  // namespace mcb
