#pragma once

#include <Eigen/Dense>

namespace fss {

// Truncated eigenbasis of the nonlocal operator A_alpha = -(-Delta)^{alpha/2}
// on (-1,1) with zero exterior condition. The working basis is the orthonormal
// sine family phi_k(x) = sin(k pi (x+1)/2) paired with the asymptotic rates
// lambda_k = (k pi/2 - (2-alpha) pi/8)^alpha, so A_alpha is diagonal here.
struct SpectralOperator {
  double alpha = 0.0;
  int n_modes = 0;
  Eigen::VectorXd eigenvalues;         // lambda_k, strictly positive, ascending
  Eigen::VectorXd basis_const_coeffs;  // c_k = <1, phi_k>: 4/(k pi) for odd k, 0 for even

  double lambda1() const { return eigenvalues(0); }
};

// lambda_k for 1-based mode index k. Requires k >= 1 and alpha in (1,2).
double eigenvalue(int k, double alpha);

SpectralOperator build_operator(double alpha, int n_modes);

// phi_k(x), 1-based k, x in [-1,1].
double basis_function(int k, double x);

// Operator norm of e^{A_alpha t} in the truncated basis; equals e^{-lambda_1 t}.
double semigroup_norm(const SpectralOperator& op, double t);

struct SemigroupCheck {
  bool ok = false;
  double measured_constant = 0.0;  // smallest C with norm(t) <= C e^{-lambda_1 t}
};

// Verifies ||e^{A_alpha t}|| <= C e^{-lambda_1 t} over the given grid.
SemigroupCheck semigroup_decay_check(const SpectralOperator& op, const Eigen::VectorXd& t_grid);

}  // namespace fss
