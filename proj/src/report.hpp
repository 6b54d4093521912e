#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gibbs.hpp"
#include "json.hpp"

namespace mcb {

// Everything that determines a run's output. Worker count is deliberately
// not part of the config: results are identical for any parallelism, so it
// must not perturb the config hash.
struct RunConfig {
  std::string command;
  std::string model = "caseA";  // caseA | caseB | caseC | custom
  int K = 0;
  int J = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double y_bar = 0.0;
  double sigma0 = 0.0;
  std::vector<double> data;  // raw observations; overrides the stats above
  double xi = 0.0;
  double prior_precision_raw = -1.0;  // <0: not supplied, use K directly
  double a = 2.0;                     // logistic shape
  std::vector<double> epsilons;
  double x0 = 1.0;
  std::vector<int> n_range;
  std::size_t replicas = 100000;
  std::uint64_t seed = 20080701;
  std::string format = "json";
  std::string table = "table1";  // for gibbs-table
};

nlohmann::json config_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
std::string content_hash(const RunConfig& cfg);  // FNV-1a over canonical JSON

GibbsModel resolve_gibbs_model(const RunConfig& cfg);

// Dispatches on cfg.command; returns the full report envelope
// {schema, command, config, content_hash, all_pass, payload}.
nlohmann::json run_report(const RunConfig& cfg, int workers);

// Individual reports (payload + all_pass folded into the envelope by
// run_report; exposed for tests and the C API).
nlohmann::json gibbs_table_report(const std::string& which);
nlohmann::json gibbs_bounds_report(const RunConfig& cfg);
nlohmann::json gibbs_certify_report(const RunConfig& cfg, int workers);
nlohmann::json logistic_certify_report(const RunConfig& cfg, int workers);
nlohmann::json drift_verify_report(const RunConfig& cfg, int workers);
nlohmann::json metrics_selftest_report();

// Flattens payload["rows"] (an array of flat objects) to CSV.
std::string report_to_csv(const nlohmann::json& report);

}  // namespace mcb
