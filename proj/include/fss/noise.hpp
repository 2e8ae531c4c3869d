#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "fss/spectral.hpp"

namespace fss {

// Deterministic per-purpose seed stream derivation (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Discretized two-sided Wiener path: independent N(0, dt) increments per
// dimension on a uniform grid starting at t0 (t0 may be negative). The path
// convention is W(0) = 0 whenever 0 lies in the window.
struct WienerPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd increments;  // steps x dims; increment i covers [t0+i*dt, t0+(i+1)*dt)

  int steps() const { return static_cast<int>(increments.rows()); }
  int dims() const { return static_cast<int>(increments.cols()); }
  double t1() const { return t0 + steps() * dt; }

  // Grid index of time t; throws window_underflow if t is off-grid or outside.
  int index_of(double t) const;

  // W(t) - W(0); requires both t and 0 inside the window.
  double value(int dim, double t) const;
};

WienerPath generate_wiener(double t0, double t1, double dt, int dims, std::uint64_t seed);

// Metric dynamical system shift theta_s: new path value at t equals the old
// value at t+s, window relabeled to [t0-s, t1-s]. Increments are untouched,
// so the flow property is bit-exact. s must be a grid multiple.
WienerPath shift_path(const WienerPath& p, double s);

// Stationary Ornstein-Uhlenbeck path sampled by the exact per-mode recursion
//   x(t+dt) = a x(t) + g,   a = e^{-rate dt},  Var g = scale^2 (1-a^2)/(2 rate_base),
// with the initial value drawn from the exact stationary law.
struct OUPath {
  double t0 = 0.0;
  double dt = 0.0;
  Eigen::MatrixXd values;   // (steps+1) x dims, row i = state at t0 + i*dt
  Eigen::VectorXd rates;    // decay rates (lambda_k/eps for fast, -Re eig(J) for slow)
  double noise_scale = 0.0;

  int steps() const { return static_cast<int>(values.rows()) - 1; }
  int dims() const { return static_cast<int>(values.cols()); }
  double t1() const { return t0 + steps() * dt; }

  int index_of(double t) const;
  Eigen::VectorXd at(double t) const;
  Eigen::VectorXd at_index(int i) const { return values.row(i).transpose(); }
};

// Fast OU eta^eps: mode-k rate lambda_k/eps, noise scale sigma1/sqrt(eps),
// stationary variance sigma1^2/(2 lambda_k). Driven by the given Wiener path
// (dims must equal op.n_modes).
OUPath ou_fast_stationary(const SpectralOperator& op, double eps, double sigma1,
                          const WienerPath& path);

// Slow OU xi for a stable J (all eigenvalues in the open left half plane;
// rejected otherwise). Exact recursion with e^{J dt} and the exact one-step
// noise covariance; stationary initial draw from the Lyapunov solution.
OUPath ou_slow_stationary(const Eigen::MatrixXd& J, double sigma2, const WienerPath& path);

OUPath shift_path(const OUPath& p, double s);

// One-step data shared between the slow OU recursion and the slow integrator
// steps, so that full-system and random-system simulations stay pathwise
// consistent when driven by the same Wiener increments.
struct SlowStep {
  Eigen::MatrixXd expJdt;      // e^{J dt}
  Eigen::MatrixXd drift_gain;  // int_0^dt e^{J s} ds
  Eigen::MatrixXd noise_gain;  // S with S S^T = int_0^dt e^{J s} e^{J^T s} ds
};
SlowStep slow_step_data(const Eigen::MatrixXd& J, double dt);

// Stationary covariance of dxi = J xi dt + sigma2 dW: solves J S + S J^T = -sigma2^2 I.
Eigen::MatrixXd ou_stationary_covariance(const Eigen::MatrixXd& J, double sigma2);

bool is_stable(const Eigen::MatrixXd& J);

}  // namespace fss
