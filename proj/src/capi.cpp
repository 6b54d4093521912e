#include "mcbound.h"

#include <cstring>
#include <new>
#include <string>

#include "gibbs.hpp"
#include "ifs.hpp"
#include "logistic.hpp"
#include "report.hpp"

namespace {

thread_local std::string g_last_error = "ok";

template <typename F>
mcb_status try_(F&& f) {
  try {
    f();
    g_last_error = "ok";
    return MCB_OK;
  } catch (const mcb::StateEscapeError& e) {
    g_last_error = e.what();
    return MCB_ERR_STATE_ESCAPE;
  } catch (const mcb::NumericError& e) {
    g_last_error = e.what();
    return MCB_ERR_NUMERIC;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return MCB_ERR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return MCB_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MCB_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return MCB_ERR_UNKNOWN;
  }
}

mcb::BoundCurve to_cpp(const mcb_bound_curve& c) {
  mcb::BoundCurve out;
  out.coefficient = c.coefficient;
  out.base = c.base;
  out.exponent_scale = c.exponent_scale;
  out.start_index = c.start_index;
  return out;
}

mcb_bound_curve to_c(const mcb::BoundCurve& c) {
  return {c.coefficient, c.base, c.exponent_scale, c.start_index};
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

struct mcb_gibbs_model {
  mcb::GibbsModel model;
};

struct mcb_system {
  mcb::RandomMapSystem system;
};

extern "C" {

const char* mcb_last_error(void) { return g_last_error.c_str(); }

mcb_status mcb_gibbs_model_create(int J, double alpha, double beta, int K,
                                  double y_bar, double sigma0,
                                  mcb_gibbs_model** out) {
  return try_([&] {
    require(out != nullptr, "null output pointer");
    *out = new mcb_gibbs_model{
        mcb::GibbsModel::from_stats(J, alpha, y_bar, sigma0, K, beta)};
  });
}

mcb_status mcb_gibbs_model_builtin(char which, int K, mcb_gibbs_model** out) {
  return try_([&] {
    require(out != nullptr, "null output pointer");
    *out = new mcb_gibbs_model{mcb::GibbsModel::builtin(which, K)};
  });
}

mcb_status mcb_gibbs_model_from_data(const double* y, size_t n, double alpha,
                                     double beta, double prior_precision,
                                     double xi, mcb_gibbs_model** out) {
  return try_([&] {
    require(out != nullptr && y != nullptr, "null pointer argument");
    std::vector<double> raw(y, y + n);
    *out = new mcb_gibbs_model{
        mcb::ingest_data(raw, alpha, beta, prior_precision, xi)};
  });
}

void mcb_gibbs_model_free(mcb_gibbs_model* model) { delete model; }

mcb_status mcb_compute_constants(const mcb_gibbs_model* model, double epsilon,
                                 mcb_gibbs_constants* out) {
  return try_([&] {
    require(model != nullptr && out != nullptr, "null pointer argument");
    mcb::GibbsConstants c = mcb::compute_constants(model->model, epsilon);
    *out = {c.r1,  c.A,    c.r1_eps, c.r2,   c.r3,
            c.A_hat, c.r3_eps, c.q,  c.B,    c.eps0,
            c.w,   c.C_tilde, c.has_r1, c.has_r2, c.has_r3,
            c.has_c1, c.has_tv0};
  });
}

mcb_status mcb_wasserstein_bound(const mcb_gibbs_model* model, int variant,
                                 double epsilon, double x, mcb_bound_curve* out) {
  return try_([&] {
    require(model != nullptr && out != nullptr, "null pointer argument");
    require(variant >= 1 && variant <= 3, "variant must be 1, 2 or 3");
    auto v = variant == 1   ? mcb::WassersteinVariant::I
             : variant == 2 ? mcb::WassersteinVariant::II
                            : mcb::WassersteinVariant::III;
    *out = to_c(mcb::wasserstein_bound(model->model, v, epsilon, x));
  });
}

mcb_status mcb_tv_bound(const mcb_gibbs_model* model,
                        const mcb_bound_curve* wasserstein, mcb_bound_curve* out) {
  return try_([&] {
    require(model != nullptr && wasserstein != nullptr && out != nullptr,
            "null pointer argument");
    *out = to_c(mcb::tv_bound(model->model, to_cpp(*wasserstein)));
  });
}

mcb_status mcb_bound_eval(const mcb_bound_curve* curve, int n, double* out) {
  return try_([&] {
    require(curve != nullptr && out != nullptr, "null pointer argument");
    *out = to_cpp(*curve).eval(n);
  });
}

mcb_status mcb_first_n_below(const mcb_bound_curve* curve, double target,
                             int* out) {
  return try_([&] {
    require(curve != nullptr && out != nullptr, "null pointer argument");
    *out = mcb::first_n_below(to_cpp(*curve), target);
  });
}

mcb_status mcb_first_n_below_printed(const mcb_bound_curve* curve, double target,
                                     int* out) {
  return try_([&] {
    require(curve != nullptr && out != nullptr, "null pointer argument");
    *out = mcb::first_n_below_printed(to_cpp(*curve), target);
  });
}

mcb_status mcb_compute_logistic_constants(double a, mcb_logistic_constants* out) {
  return try_([&] {
    require(out != nullptr, "null output pointer");
    mcb::LogisticConstants c = mcb::compute_logistic_constants({a});
    *out = {c.q, c.B, c.eps0, c.C_tilde_a, c.K_a, c.K_tilde_a};
  });
}

mcb_status mcb_gibbs_system_create(const mcb_gibbs_model* model,
                                   mcb_system** out) {
  return try_([&] {
    require(model != nullptr && out != nullptr, "null pointer argument");
    *out = new mcb_system{mcb::gibbs_system(model->model)};
  });
}

mcb_status mcb_logistic_system_create(double a, mcb_system** out) {
  return try_([&] {
    require(out != nullptr, "null output pointer");
    *out = new mcb_system{mcb::logistic_system({a})};
  });
}

void mcb_system_free(mcb_system* sys) { delete sys; }

mcb_status mcb_forward_iterate(const mcb_system* sys, double x0, int n,
                               uint64_t seed, uint64_t stream, double* states) {
  return try_([&] {
    require(sys != nullptr && states != nullptr, "null pointer argument");
    mcb::Trajectory t =
        mcb::forward_iterate(sys->system, x0, n, mcb::RngStream(seed, stream));
    std::memcpy(states, t.states.data(), t.states.size() * sizeof(double));
  });
}

mcb_status mcb_backward_iterate(const mcb_system* sys, double x0, int n,
                                uint64_t seed, uint64_t stream, double* out) {
  return try_([&] {
    require(sys != nullptr && out != nullptr, "null pointer argument");
    *out = mcb::backward_iterate(sys->system, x0, n, mcb::RngStream(seed, stream));
  });
}

mcb_status mcb_sample_stationary_exact(const mcb_system* sys, size_t count,
                                       uint64_t seed, uint64_t stream,
                                       int workers, double* out) {
  return try_([&] {
    require(sys != nullptr && out != nullptr, "null pointer argument");
    mcb::StationarySample s =
        mcb::sample_stationary(sys->system, mcb::StationaryMethod::Exact, 0,
                               count, mcb::RngStream(seed, stream), workers);
    std::memcpy(out, s.values.data(), s.values.size() * sizeof(double));
  });
}

mcb_status mcb_run_report_json(const char* config, int workers, char** out) {
  return try_([&] {
    require(config != nullptr && out != nullptr, "null pointer argument");
    nlohmann::json j = nlohmann::json::parse(config, nullptr, false);
    require(!j.is_discarded(), "config is not valid JSON");
    mcb::RunConfig cfg = mcb::config_from_json(j);
    *out = dup_string(mcb::run_report(cfg, workers).dump(2));
  });
}

mcb_status mcb_report_to_csv(const char* report, char** out) {
  return try_([&] {
    require(report != nullptr && out != nullptr, "null pointer argument");
    nlohmann::json j = nlohmann::json::parse(report, nullptr, false);
    require(!j.is_discarded(), "report is not valid JSON");
    *out = dup_string(mcb::report_to_csv(j));
  });
}

void mcb_string_free(char* s) { delete[] s; }

}  // extern "C"
