// Command-line front end. All computation lives behind the C API; this file
// only translates flags into a JSON run config and formats the result.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcbound.h"

namespace {

std::vector<double> read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--data", "cannot open " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    // Strip whitespace; skip blanks and a possible header row.
    std::string s;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s.empty()) continue;
    try {
      values.push_back(std::stod(s));
    } catch (const std::exception&) {
      if (values.empty()) continue;  // header
      throw CLI::ValidationError("--data", "non-numeric row: " + line);
    }
  }
  if (values.empty()) throw CLI::ValidationError("--data", "no values in " + path);
  return values;
}

std::vector<int> parse_n_range(const std::string& spec) {
  // "a..b" expands to a,a+1,...,b; otherwise a comma list.
  std::vector<int> out;
  auto dots = spec.find("..");
  if (dots != std::string::npos) {
    int a = std::stoi(spec.substr(0, dots));
    int b = std::stoi(spec.substr(dots + 2));
    for (int n = a; n <= b; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

struct CommonFlags {
  std::string model = "caseA";
  int K = 0;
  int J = 0;
  double alpha = 0.0, beta = 0.0, ybar = 0.0, sigma0 = 0.0;
  std::string data_path;
  double xi = 0.0;
  double prior_precision = -1.0;
  double a = 2.0;
  std::vector<double> epsilons;
  double x0 = 1.0;
  std::string n_range;
  std::size_t replicas = 100000;
  std::uint64_t seed = 20080701;
  int workers = 0;
  std::string format = "json";
  std::string out_path;
  std::string table = "table1";
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--model", f.model, "caseA|caseB|caseC|custom")
      ->check(CLI::IsMember({"caseA", "caseB", "caseC", "custom"}));
  cmd->add_option("--K", f.K, "prior precision, 0 or 1")->check(CLI::Range(0, 1));
  cmd->add_option("--J", f.J, "sample size (custom model)");
  cmd->add_option("--alpha", f.alpha, "Gamma shape (custom model)");
  cmd->add_option("--beta", f.beta, "Gamma rate (custom model)");
  cmd->add_option("--ybar", f.ybar, "data mean (custom model)");
  cmd->add_option("--sigma0", f.sigma0, "beta + half squared spread (custom model)");
  cmd->add_option("--data", f.data_path, "one-column CSV of raw observations");
  cmd->add_option("--xi", f.xi, "prior mean of raw data (used with --data)");
  cmd->add_option("--prior-precision", f.prior_precision,
                  "raw prior precision before standardization (used with --data)");
  cmd->add_option("--a", f.a, "logistic shape parameter");
  cmd->add_option("--epsilon", f.epsilons, "truncation level(s)");
  cmd->add_option("--x0", f.x0, "start state");
  cmd->add_option("--n-range", f.n_range, "steps, e.g. 1..10 or 1,2,5,10");
  cmd->add_option("--replicas", f.replicas, "Monte Carlo replicas");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  cmd->add_option("--format", f.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", f.out_path, "output path (default stdout)");
}

nlohmann::json build_config(const std::string& command, const CommonFlags& f) {
  nlohmann::json cfg;
  cfg["command"] = command;
  cfg["model"] = f.model;
  cfg["K"] = f.K;
  if (f.model == "custom") {
    cfg["J"] = f.J;
    cfg["alpha"] = f.alpha;
    cfg["beta"] = f.beta;
    cfg["y_bar"] = f.ybar;
    cfg["sigma0"] = f.sigma0;
    if (!f.data_path.empty()) {
      cfg["data"] = read_data_csv(f.data_path);
      cfg["xi"] = f.xi;
      cfg["prior_precision_raw"] = f.prior_precision;
    }
  }
  cfg["a"] = f.a;
  cfg["epsilons"] = f.epsilons;
  cfg["x0"] = f.x0;
  if (!f.n_range.empty()) cfg["n_range"] = parse_n_range(f.n_range);
  cfg["replicas"] = f.replicas;
  cfg["seed"] = f.seed;
  cfg["format"] = f.format;
  cfg["table"] = f.table;
  return cfg;
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    out << text << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence-rate bounds and Monte Carlo certification for "
               "iterated random function systems"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string command;

  auto* table = app.add_subcommand(
      "gibbs-table", "recompute quoted constants tables and thresholds");
  table->add_option("--which", flags.table,
                    "table1|table2|remarks_k1|remarks_k0_tv|remarks_k1_tv")
      ->check(CLI::IsMember({"table1", "table2", "remarks_k1", "remarks_k0_tv",
                             "remarks_k1_tv"}));
  add_common_flags(table, flags);
  table->callback([&] { command = "gibbs-table"; });

  auto* bounds = app.add_subcommand(
      "gibbs-bounds", "analytic constants and bound curves for a model");
  add_common_flags(bounds, flags);
  bounds->callback([&] { command = "gibbs-bounds"; });

  auto* certify = app.add_subcommand(
      "gibbs-certify", "Monte Carlo certification of the Wasserstein bounds");
  add_common_flags(certify, flags);
  certify->callback([&] { command = "gibbs-certify"; });

  auto* logistic = app.add_subcommand(
      "logistic-certify", "decay-rate fits for the random logistic map");
  add_common_flags(logistic, flags);
  logistic->callback([&] { command = "logistic-certify"; });

  auto* drift = app.add_subcommand(
      "drift-verify", "Monte Carlo check of the drift growth condition");
  add_common_flags(drift, flags);
  drift->callback([&] { command = "drift-verify"; });

  auto* selftest =
      app.add_subcommand("metrics-selftest", "distance-computation self checks");
  add_common_flags(selftest, flags);
  selftest->callback([&] { command = "metrics-selftest"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  nlohmann::json cfg;
  try {
    cfg = build_config(command, flags);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  int workers = flags.workers > 0
                    ? flags.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  char* report = nullptr;
  mcb_status st = mcb_run_report_json(cfg.dump().c_str(), workers, &report);
  if (st != MCB_OK) {
    std::cerr << "error: " << mcb_last_error() << "\n";
    return st == MCB_ERR_INVALID_ARGUMENT || st == MCB_ERR_DOMAIN ? 2 : 1;
  }
  std::string text = report;
  mcb_string_free(report);

  bool all_pass = true;
  try {
    all_pass = nlohmann::json::parse(text).value("all_pass", true);
  } catch (const std::exception&) {
  }

  if (flags.format == "csv") {
    char* csv = nullptr;
    st = mcb_report_to_csv(text.c_str(), &csv);
    if (st != MCB_OK) {
      std::cerr << "error: " << mcb_last_error() << "\n";
      return 1;
    }
    text = csv;
    mcb_string_free(csv);
  }

  int rc = emit(text, flags.out_path);
  if (rc != 0) return rc;
  return all_pass ? 0 : 1;
}
