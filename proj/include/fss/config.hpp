#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "fss/model.hpp"

namespace fss {

// Fully resolved run configuration. The on-disk format is a sectioned
// key=value text file; every key below maps to "section.key". Unknown keys
// and malformed numbers are rejected at load time.
struct RunConfig {
  // [model]
  std::string model_name = "example2";  // "example2" or "custom" (linear drifts)
  double alpha = 1.2;
  double eps = 0.01;
  double sigma1 = 0.1;
  double sigma2 = 0.1;
  int n_modes = 16;
  double gamma2 = 1.0;
  double a = 1.0;                       // slow-drift parameter of example2
  Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(1, 1);

  // [numerics]
  double dt = 1e-3;
  double t_total = 1.0;
  double t_minus = 2.0;
  double tol = 1e-8;
  int max_iter = 50;
  int n_mc = 50;
  std::uint64_t seed = 20250826;
  int n_workers = 0;

  // [experiment]
  std::string experiment = "check";     // check | simulate | manifold | tracking | estimate
  Eigen::VectorXd v0 = Eigen::VectorXd::Constant(1, 2.0);
  double v0_grid_lo = -3.0;
  double v0_grid_hi = 3.0;
  double v0_grid_step = 0.5;
  double d_lo = 0.2;
  double d_hi = 2.0;
  double a_true = 1.0;
  int grid_n = 21;
  int refine_iters = 20;
  std::string projection = "integral";      // integral | fiber
  std::string obs_source = "full";      // full | reduced
  double tracking_offset = 1.0;         // initial fast offset scale for tracking runs

  // [output]
  std::string out_dir = "out";
  bool dump_paths = false;
};

RunConfig load_config(const std::string& path);

// Applies a single "section.key=value" override.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Validates cross-field invariants (ranges, experiment and model names).
void validate_config(const RunConfig& cfg);

// Serializes the fully resolved config in the same sectioned format;
// load_config on the result reproduces cfg exactly.
std::string dump_config(const RunConfig& cfg);

ModelSpec build_model(const RunConfig& cfg);

}  // namespace fss
