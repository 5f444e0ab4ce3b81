#include "zdiheat/zdiheat.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "zdiheat/experiment.hpp"
#include "zdiheat/gevrey.hpp"
#include "zdiheat/greens.hpp"

struct zdh_config {
  zdiheat::ExperimentConfig value;
};

struct zdh_report {
  zdiheat::RunReport value;
  std::string text;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_stage;
thread_local bool g_validation = false;

zdh_status to_status(zdiheat::ErrorKind kind) {
  using zdiheat::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return ZDH_ERR_INVALID_ARGUMENT;
    case ErrorKind::kConfig: return ZDH_ERR_CONFIG;
    case ErrorKind::kIo: return ZDH_ERR_IO;
    case ErrorKind::kOverflowAtOrder: return ZDH_ERR_OVERFLOW_AT_ORDER;
    case ErrorKind::kInsufficientData: return ZDH_ERR_INSUFFICIENT_DATA;
    case ErrorKind::kNearSingular: return ZDH_ERR_NEAR_SINGULAR;
    case ErrorKind::kTruncationFailure: return ZDH_ERR_TRUNCATION_FAILURE;
    case ErrorKind::kDivergentSeries: return ZDH_ERR_DIVERGENT_SERIES;
    case ErrorKind::kUnstableStep: return ZDH_ERR_UNSTABLE_STEP;
    case ErrorKind::kSnapTooLarge: return ZDH_ERR_SNAP_TOO_LARGE;
  }
  return ZDH_ERR_INTERNAL;
}

zdh_status fail_with(zdh_status status, std::string message) {
  g_error = std::move(message);
  return status;
}

template <class F>
zdh_status guarded(F&& body) {
  g_error.clear();
  g_stage.clear();
  g_validation = false;
  try {
    body();
    return ZDH_OK;
  } catch (const zdiheat::StageError& e) {
    g_stage = e.stage();
    g_validation = e.stage() == zdiheat::kValidateStage || zdiheat::is_validation_error(e.kind());
    return fail_with(to_status(e.kind()), e.what());
  } catch (const zdiheat::Error& e) {
    g_validation = zdiheat::is_validation_error(e.kind());
    return fail_with(to_status(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(ZDH_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(ZDH_ERR_INTERNAL, e.what());
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

zdiheat::BumpForm bump(zdh_bump_form form) {
  return form == ZDH_BUMP_PRINTED ? zdiheat::BumpForm::kPrinted : zdiheat::BumpForm::kStandard;
}

}  // namespace

extern "C" {

const char* zdh_last_error(void) { return g_error.c_str(); }
const char* zdh_last_stage(void) { return g_stage.c_str(); }
int zdh_last_error_is_validation(void) { return g_validation ? 1 : 0; }

const char* zdh_status_name(zdh_status status) {
  switch (status) {
    case ZDH_OK: return "ok";
    case ZDH_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case ZDH_ERR_CONFIG: return "ConfigError";
    case ZDH_ERR_IO: return "IoError";
    case ZDH_ERR_OVERFLOW_AT_ORDER: return "OverflowAtOrder";
    case ZDH_ERR_INSUFFICIENT_DATA: return "InsufficientData";
    case ZDH_ERR_NEAR_SINGULAR: return "NearSingular";
    case ZDH_ERR_TRUNCATION_FAILURE: return "TruncationFailure";
    case ZDH_ERR_DIVERGENT_SERIES: return "DivergentSeries";
    case ZDH_ERR_UNSTABLE_STEP: return "UnstableStep";
    case ZDH_ERR_SNAP_TOO_LARGE: return "SnapTooLarge";
    case ZDH_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

zdh_status zdh_config_default(zdh_config** out) {
  if (!out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null output handle");
  return guarded([&] { *out = new zdh_config{}; });
}

zdh_status zdh_config_load(const char* path, zdh_config** out) {
  if (!path || !out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new zdh_config{zdiheat::load_config(path)}; });
}

zdh_status zdh_config_parse(const char* text, zdh_config** out) {
  if (!text || !out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new zdh_config{zdiheat::parse_config(text)}; });
}

zdh_status zdh_config_set(zdh_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { zdiheat::set_config_value(config->value, key, value); });
}

zdh_status zdh_config_format(const zdh_config* config, char** out) {
  if (!config || !out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = duplicate(zdiheat::format_config(config->value)); });
}

void zdh_config_free(zdh_config* config) { delete config; }

zdh_status zdh_run(const zdh_config* config, const char* out_dir, zdh_report** out) {
  if (!config || !out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string dir = out_dir ? out_dir : config->value.output_dir;
    auto* report = new zdh_report{zdiheat::run(config->value, dir), {}};
    report->text = zdiheat::format_report(report->value, config->value);
    *out = report;
  });
}

size_t zdh_report_actuators(const zdh_report* r) { return r ? r->value.achieved_orders.size() : 0; }

zdh_status zdh_report_achieved_order(const zdh_report* r, size_t j, size_t* out) {
  if (!r || !out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  if (j >= r->value.achieved_orders.size()) {
    return fail_with(ZDH_ERR_INVALID_ARGUMENT, "actuator index out of range");
  }
  *out = r->value.achieved_orders[j];
  return ZDH_OK;
}

double zdh_report_final_max_error(const zdh_report* r) { return r ? r->value.final_max_error : 0.0; }
double zdh_report_max_target(const zdh_report* r) { return r ? r->value.max_target : 0.0; }
double zdh_report_midpoint_error(const zdh_report* r) { return r ? r->value.midpoint_error : 0.0; }
double zdh_report_model_discrepancy(const zdh_report* r) {
  return r ? r->value.model_discrepancy : 0.0;
}
double zdh_report_condition(const zdh_report* r) { return r ? r->value.condition_estimate : 0.0; }
double zdh_report_runtime(const zdh_report* r) { return r ? r->value.total_seconds() : 0.0; }
const char* zdh_report_text(const zdh_report* r) { return r ? r->text.c_str() : ""; }
void zdh_report_free(zdh_report* r) { delete r; }

zdh_status zdh_verify(const zdh_config* config, char** table, int* all_passed) {
  if (!config || !table || !all_passed) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto checks = zdiheat::verify(config->value);
    int ok = 1;
    for (const auto& c : checks) ok = ok && c.passed;
    *table = duplicate(zdiheat::format_checks(checks));
    *all_passed = ok;
  });
}

zdh_status zdh_sweep(const zdh_config* config, const char* parameter, const double* values,
                     size_t count, const char* out_dir, size_t workers, size_t* failed) {
  if (!config || !parameter || !out_dir || (count > 0 && !values)) {
    return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const auto rows = zdiheat::sweep(config->value, parameter,
                                     std::vector<double>(values, values + count), out_dir, workers);
    size_t bad = 0;
    for (const auto& r : rows) bad += r.status == "ok" ? 0 : 1;
    if (failed) *failed = bad;
  });
}

void zdh_string_free(char* s) { std::free(s); }

zdh_status zdh_green_eval(double x, double zeta, double k0, double k1, double* out) {
  if (!out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    zdiheat::require(x >= 0.0 && x <= 1.0 && zeta >= 0.0 && zeta <= 1.0,
                     "Green's function arguments must lie in [0,1]");
    *out = zdiheat::greens_eval(x, zeta, zdiheat::BoundaryParams(k0, k1));
  });
}

zdh_status zdh_phi(double t, double sigma, double duration, zdh_bump_form form, double* out) {
  if (!out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] { *out = zdiheat::phi(t, zdiheat::GevreySpec(sigma, duration, bump(form))); });
}

zdh_status zdh_phi_jet(double t, double sigma, double duration, zdh_bump_form form, size_t order,
                       double* out) {
  if (!out) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const auto jet = zdiheat::phi_jet(t, zdiheat::GevreySpec(sigma, duration, bump(form)), order);
    for (size_t n = 0; n <= order; ++n) out[n] = jet[n];
  });
}

zdh_status zdh_static_plan(const double* points, size_t m, double k0, double k1, const double* target,
                           double* alpha_bar, double* ybar) {
  if (!points || !target || !alpha_bar || !ybar) return fail_with(ZDH_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const zdiheat::ActuatorLayout layout(std::vector<double>(points, points + m));
    const auto plan = zdiheat::static_plan(std::span<const double>(target, m), layout,
                                           zdiheat::BoundaryParams(k0, k1));
    for (size_t j = 0; j < m; ++j) {
      alpha_bar[j] = plan.alpha_bar[j];
      ybar[j] = plan.ybar[j];
    }
  });
}

}  // extern "C"
