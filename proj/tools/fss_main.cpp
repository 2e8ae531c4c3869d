#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsslow.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

int status_to_exit(fss_status st) {
  switch (st) {
    case FSS_OK: return kExitPass;
    case FSS_ERR_NO_CONVERGENCE: return kExitInvariant;
    case FSS_ERR_INVALID_ARGUMENT:
    case FSS_ERR_IO: return kExitConfig;
    default: return kExitInvariant;
  }
}

struct Handle {
  fss_config* cfg = fss_config_create();
  ~Handle() { fss_config_free(cfg); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fss: fast-slow stochastic systems, slow manifolds, and parameter estimation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::vector<std::string> sets;
  for (const char* name : {"check", "simulate", "manifold", "tracking", "estimate"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "random seed (overrides numerics.seed)")
        ->each([&](const std::string&) { have_seed = true; });
    sub->add_option("--set", sets, "override a config key, e.g. --set model.alpha=1.5");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  Handle h;
  if (!h.cfg) {
    std::fprintf(stderr, "error: out of memory\n");
    return kExitInvariant;
  }

  auto fail = [&](fss_status st, const char* what) {
    std::fprintf(stderr, "error: %s: %s\n", what, fss_last_error());
    return status_to_exit(st);
  };

  if (!config_path.empty()) {
    const fss_status st = fss_config_load(h.cfg, config_path.c_str());
    if (st != FSS_OK) return fail(st, "loading config");
  }
  {
    const fss_status st = fss_config_set(h.cfg, "experiment.name", experiment.c_str());
    if (st != FSS_OK) return fail(st, "selecting experiment");
  }
  if (have_seed) {
    const fss_status st =
        fss_config_set(h.cfg, "numerics.seed", std::to_string(seed).c_str());
    if (st != FSS_OK) return fail(st, "setting seed");
  }
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return kExitConfig;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const fss_status st = fss_config_set(h.cfg, key.c_str(), value.c_str());
    if (st != FSS_OK) return fail(st, "applying override");
  }

  char* summary = nullptr;
  const fss_status st = fss_run(h.cfg, out_dir.empty() ? nullptr : out_dir.c_str(), &summary);
  if (summary) {
    std::fputs(summary, stdout);
    fss_string_free(summary);
  }
  if (st != FSS_OK && st != FSS_ERR_NO_CONVERGENCE)
    return fail(st, "running experiment");
  if (st == FSS_ERR_NO_CONVERGENCE) {
    std::fprintf(stderr, "experiment failed its invariants\n");
    return kExitInvariant;
  }
  return kExitPass;
}
