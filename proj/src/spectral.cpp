#include "fss/spectral.hpp"

#include <cmath>

#include "fss/errors.hpp"

namespace fss {

double eigenvalue(int k, double alpha) {
  require(k >= 1, ErrorCode::invalid_argument, "eigenvalue: mode index k must be >= 1");
  require(alpha > 1.0 && alpha < 2.0, ErrorCode::invalid_argument,
          "eigenvalue: alpha must lie in (1,2)");
  const double base = k * M_PI / 2.0 - (2.0 - alpha) * M_PI / 8.0;
  return std::pow(base, alpha);
}

SpectralOperator build_operator(double alpha, int n_modes) {
  require(n_modes >= 1, ErrorCode::invalid_argument, "build_operator: n_modes must be >= 1");
  SpectralOperator op;
  op.alpha = alpha;
  op.n_modes = n_modes;
  op.eigenvalues.resize(n_modes);
  op.basis_const_coeffs.resize(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    const int k = i + 1;
    op.eigenvalues(i) = eigenvalue(k, alpha);
    op.basis_const_coeffs(i) = (k % 2 == 1) ? 4.0 / (k * M_PI) : 0.0;
  }
  return op;
}

double basis_function(int k, double x) {
  return std::sin(k * M_PI * (x + 1.0) / 2.0);
}

double semigroup_norm(const SpectralOperator& op, double t) {
  require(t >= 0.0, ErrorCode::invalid_argument, "semigroup_norm: t must be >= 0");
  // Diagonal operator: the norm is the largest entry, attained at lambda_1.
  return std::exp(-op.lambda1() * t);
}

SemigroupCheck semigroup_decay_check(const SpectralOperator& op, const Eigen::VectorXd& t_grid) {
  require(t_grid.size() > 0, ErrorCode::invalid_argument, "semigroup_decay_check: empty grid");
  SemigroupCheck out;
  double c = 0.0;
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid(i);
    require(t >= 0.0, ErrorCode::invalid_argument, "semigroup_decay_check: t must be >= 0");
    c = std::max(c, semigroup_norm(op, t) * std::exp(op.lambda1() * t));
  }
  out.measured_constant = c;
  out.ok = c <= 1.0 + 1e-12;
  return out;
}

}  // namespace fss
