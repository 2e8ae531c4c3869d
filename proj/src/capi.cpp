#include "fsslow.h"

#include <cstring>
#include <new>
#include <string>

#include "fss/config.hpp"
#include "fss/errors.hpp"
#include "fss/experiments.hpp"
#include "fss/model.hpp"
#include "fss/spectral.hpp"

namespace {

thread_local std::string g_last_error;

fss_status set_error(const fss::Error& e) {
  g_last_error = e.what();
  switch (e.code()) {
    case fss::ErrorCode::invalid_argument: return FSS_ERR_INVALID_ARGUMENT;
    case fss::ErrorCode::hypothesis_violation: return FSS_ERR_HYPOTHESIS;
    case fss::ErrorCode::window_underflow: return FSS_ERR_WINDOW;
    case fss::ErrorCode::no_convergence: return FSS_ERR_NO_CONVERGENCE;
    case fss::ErrorCode::io_failure: return FSS_ERR_IO;
    case fss::ErrorCode::internal: return FSS_ERR_INTERNAL;
  }
  return FSS_ERR_INTERNAL;
}

template <typename Fn>
fss_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FSS_OK;
  } catch (const fss::Error& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FSS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FSS_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct fss_config {
  fss::RunConfig cfg;
};

extern "C" {

const char* fss_version(void) { return "1.0.0"; }

const char* fss_last_error(void) { return g_last_error.c_str(); }

fss_config* fss_config_create(void) { return new (std::nothrow) fss_config(); }

void fss_config_free(fss_config* cfg) { delete cfg; }

fss_status fss_config_load(fss_config* cfg, const char* path) {
  if (!cfg || !path) {
    g_last_error = "fss_config_load: null argument";
    return FSS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { cfg->cfg = fss::load_config(path); });
}

fss_status fss_config_set(fss_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    g_last_error = "fss_config_set: null argument";
    return FSS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { fss::apply_override(cfg->cfg, key, value); });
}

fss_status fss_run(fss_config* cfg, const char* out_dir, char** summary) {
  if (!cfg) {
    g_last_error = "fss_run: null config";
    return FSS_ERR_INVALID_ARGUMENT;
  }
  int exit_code = 0;
  const fss_status st = guarded([&] {
    fss::RunConfig rc = cfg->cfg;
    if (out_dir) rc.out_dir = out_dir;
    const fss::RunOutcome outcome = fss::run_experiment(rc);
    exit_code = outcome.exit_code;
    if (summary) *summary = dup_string(outcome.summary);
  });
  if (st != FSS_OK) return st;
  if (exit_code != 0) {
    g_last_error = "experiment ran but failed its invariants";
    return FSS_ERR_NO_CONVERGENCE;
  }
  return FSS_OK;
}

void fss_string_free(char* s) { delete[] s; }

fss_status fss_eigenvalue(int k, double alpha, double* out) {
  if (!out) {
    g_last_error = "fss_eigenvalue: null output";
    return FSS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = fss::eigenvalue(k, alpha); });
}

fss_status fss_hypothesis_check(fss_config* cfg, int* gap_ok, double* mu) {
  if (!cfg) {
    g_last_error = "fss_hypothesis_check: null config";
    return FSS_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const fss::ModelSpec m = fss::build_model(cfg->cfg);
    const fss::HypothesisReport rep = fss::hypothesis_check(m);
    if (gap_ok) *gap_ok = rep.gap_ok ? 1 : 0;
    if (mu) *mu = rep.mu;
  });
}

}  // extern "C"
