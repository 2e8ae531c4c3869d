#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fss/simulate.hpp"

namespace fss {

struct LPConfig {
  double t_minus = 2.0;   // past-window truncation T_-
  double dt = 1e-3;
  double tol = 1e-8;      // weighted-sup-norm stopping tolerance
  int max_iter = 50;
  double beta = 0.0;      // weight exponent; 0 means the default -mu/eps
  bool override_gap = false;
};

struct ManifoldSolution {
  Eigen::VectorXd V0;
  Trajectory z_path;            // converged trajectory on [-T_-, 0]
  Eigen::VectorXd H_value;      // H^eps(omega, V0) = U(0)
  int iterations = 0;
  double contraction_estimate = 0.0;  // last ratio of successive weighted-norm differences
  std::vector<std::string> warnings;
};

// Effective truncation: the weight e^{(mu/eps) t} suppresses the deleted tail
// below tol when T_- >= 3 eps ln(1/tol)/mu.
double effective_t_minus(const ModelSpec& m, const LPConfig& cfg);

// Discrete weighted sup norm max_t e^{(mu/eps) t} (||u(t)||_1 + ||v(t)||_2), t <= 0.
double weighted_sup_norm(const Trajectory& z, double weight_rate);

// One application of the Lyapunov-Perron map to a candidate path on [-T_-, 0]:
// past integral truncated at -T_- and evaluated by exponential quadrature
// (piecewise-constant integrand against the exact per-mode kernel).
Trajectory lp_iterate(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                      const Eigen::VectorXd& V0, const Trajectory& z);

// Fixed-point iteration from the zero path until the weighted-sup change
// drops below cfg.tol.
ManifoldSolution lp_solve(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                          const Eigen::VectorXd& V0, const LPConfig& cfg);

// Leading-order manifold H^0: the stationary balance (-A_alpha) H = f(H, V0),
// solved in closed form when f is u-independent, by damped iteration otherwise.
Eigen::VectorXd h0_leading_order(const ModelSpec& m, const Eigen::VectorXd& V0);

// Graph Lipschitz bound of the manifold:
//   K / ((lambda1-mu) [1 - K (1/(lambda1-mu) + eps/(eps gamma2 + mu))]).
double graph_lipschitz_bound(const ModelSpec& m);

struct LipschitzReport {
  double measured_lip = 0.0;
  double graph_bound = 0.0;
  bool pass = false;
};

LipschitzReport lipschitz_estimate(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                                   const std::vector<Eigen::VectorXd>& v_grid,
                                   const LPConfig& cfg, double slack = 0.10);

// Manifold evaluators for the reduced system. The default is the order-eps
// expansion H^0(v); the lp variant re-solves the fixed point on the fiber of
// the time-shifted noise at every query (slow, kept behind a flag).
ManifoldEval make_h0_evaluator(const ModelSpec& m);
ManifoldEval make_lp_evaluator(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                               const LPConfig& cfg);

}  // namespace fss
