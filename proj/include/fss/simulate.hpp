#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fss/model.hpp"
#include "fss/noise.hpp"

namespace fss {

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd fast;  // (steps+1) x n_modes
  Eigen::MatrixXd slow;  // (steps+1) x m
  std::vector<std::string> warnings;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  Eigen::VectorXd fast_at(int i) const { return fast.row(i).transpose(); }
  Eigen::VectorXd slow_at(int i) const { return slow.row(i).transpose(); }
};

// Exponential Euler-Maruyama for the full stochastic system (per-mode exact
// linear propagation, exact stochastic-convolution variance). Noise paths must
// cover [t_start, t_start+T] on the same grid step dt.
Trajectory simulate_full(const ModelSpec& m, const WienerPath& w_fast, const WienerPath& w_slow,
                         const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double T, double dt,
                         double t_start = 0.0);

// The transformed random evolutionary system: drift arguments shifted by the
// stationary OU paths, no direct noise forcing.
Trajectory simulate_random(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                           const Eigen::VectorXd& U0, const Eigen::VectorXd& V0, double T,
                           double dt, double t_start = 0.0);

// Manifold graph evaluator: (t, slow state) -> fast coefficients H(theta_t omega, v).
using ManifoldEval = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Reduced slow SDE on the manifold fiber:
//   dv = J v dt + g(H(theta_t omega, v) + eta(t), v + xi(t), d) dt + sigma2 dW^2.
Trajectory simulate_reduced(const ModelSpec& m, const ManifoldEval& H, const OUPath& eta,
                            const OUPath& xi, const WienerPath& w_slow,
                            const Eigen::VectorXd& v0, double d, double T, double dt,
                            double t_start = 0.0);

}  // namespace fss
