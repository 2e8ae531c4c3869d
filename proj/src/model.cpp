#include "fss/model.hpp"

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "fss/errors.hpp"
#include "fss/noise.hpp"

namespace fss {

ModelSpec make_example2(double alpha, double eps, double sigma1, double sigma2, double a,
                        int n_modes) {
  require(eps > 0.0, ErrorCode::invalid_argument, "make_example2: eps must be positive");
  require(a >= 0.0, ErrorCode::invalid_argument, "make_example2: a must be nonnegative");
  ModelSpec m;
  m.op = build_operator(alpha, n_modes);
  m.eps = eps;
  m.sigma1 = sigma1;
  m.sigma2 = sigma2;
  m.J = -Eigen::MatrixXd::Identity(1, 1);
  m.gamma2 = 1.0;
  m.param_d = a;
  m.lip_f = 0.01;
  m.lip_g = 0.01 * a;

  const Eigen::VectorXd c = m.op.basis_const_coeffs;
  m.f = [c](const Eigen::VectorXd&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const double s = 0.01 * (std::sqrt(v(0) * v(0) + 5.0) - std::sqrt(5.0));
    return s * c;  // constant-in-x nonlinearity projected onto the basis
  };
  m.g = [c](const Eigen::VectorXd& u, const Eigen::VectorXd&, double d) -> Eigen::VectorXd {
    Eigen::VectorXd out(1);
    out(0) = 0.01 * d * std::sin(c.dot(u));  // c.dot(u) = integral of u over (-1,1)
    return out;
  };
  return m;
}

ModelSpec make_linear_model(double alpha, double eps, double sigma1, double sigma2,
                            const Eigen::MatrixXd& J, double gamma2, int n_modes) {
  require(eps > 0.0, ErrorCode::invalid_argument, "make_linear_model: eps must be positive");
  require(J.rows() == J.cols() && J.rows() >= 1, ErrorCode::invalid_argument,
          "make_linear_model: J must be square");
  ModelSpec m;
  m.op = build_operator(alpha, n_modes);
  m.eps = eps;
  m.sigma1 = sigma1;
  m.sigma2 = sigma2;
  m.J = J;
  m.gamma2 = gamma2;
  const int n = n_modes;
  const int md = static_cast<int>(J.rows());
  m.f = [n](const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(n).eval(); };
  m.g = [md](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    return Eigen::VectorXd::Zero(md).eval();
  };
  m.lip_f = 0.0;
  m.lip_g = 0.0;
  return m;
}

namespace {

// Largest sampled difference quotient of f (resp. g) w.r.t. the combined
// H1 + H2 metric, including axis-aligned perturbations.
std::pair<double, double> sampled_lipschitz(const ModelSpec& m) {
  std::mt19937_64 gen(0x11ce11ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = m.n_modes();
  const int md = m.slow_dim();
  double max_f = 0.0, max_g = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd u(n), v(md), du(n), dv(md);
    for (int i = 0; i < n; ++i) u(i) = gauss(gen);
    for (int i = 0; i < md; ++i) v(i) = gauss(gen);
    for (int i = 0; i < n; ++i) du(i) = gauss(gen);
    for (int i = 0; i < md; ++i) dv(i) = gauss(gen);
    if (trial % 3 == 1) du.setZero();  // slow-only perturbation
    if (trial % 3 == 2) dv.setZero();
    const double h = 1e-3;
    const double denom = h * (du.norm() + dv.norm());
    if (denom < 1e-12) continue;
    const double df = (m.f(u + h * du, v + h * dv) - m.f(u, v)).norm();
    const double dg = (m.g(u + h * du, v + h * dv, m.param_d) - m.g(u, v, m.param_d)).norm();
    max_f = std::max(max_f, df / denom);
    max_g = std::max(max_g, dg / denom);
  }
  return {max_f, max_g};
}

}  // namespace

HypothesisReport hypothesis_check(const ModelSpec& m) {
  HypothesisReport r;
  const double lambda1 = m.op.lambda1();
  const double g2 = m.gamma2;
  r.mu = g2 / (2.0 * lambda1 + g2);
  r.lip_bound_rhs = lambda1 * g2 / (2.0 * lambda1 + g2);
  r.k_declared = m.lipschitz_k();
  r.mu_in_unit = r.mu > 0.0 && r.mu < 1.0;
  r.k_below_mu_lambda = r.k_declared < r.mu * lambda1;
  r.gap_minus_mu = lambda1 - r.mu > r.k_declared;
  r.gap_ok = r.k_declared < r.lip_bound_rhs && r.mu_in_unit && r.k_below_mu_lambda &&
             r.gap_minus_mu;

  // Forward-decay check of e^{Jt} at rate gamma2, sampled on t in [0, 5].
  // H1's literal statement uses t <= 0; the sign conventions in the source
  // material disagree, so the check matches the worked system (J = -1, gamma2 = 1).
  r.j_decay_ok = true;
  std::mt19937_64 gen(0x7d3cull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 1; i <= 10 && r.j_decay_ok; ++i) {
    const double t = 0.5 * i;
    const Eigen::MatrixXd e = (m.J * t).exp();
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::VectorXd v(m.slow_dim());
      for (int d = 0; d < m.slow_dim(); ++d) v(d) = gauss(gen);
      if ((e * v).norm() > std::exp(-m.gamma2 * t) * v.norm() * (1.0 + 1e-9)) {
        r.j_decay_ok = false;
        break;
      }
    }
  }
  if (!r.j_decay_ok)
    r.warnings.push_back("e^{Jt} decays slower than the declared gamma2 on sampled t");

  auto [sf, sg] = sampled_lipschitz(m);
  r.sampled_lip_f = sf;
  r.sampled_lip_g = sg;
  if (sf > m.lip_f * (1.0 + 1e-9))
    r.warnings.push_back("sampled Lipschitz quotient of f exceeds the declared lip_f");
  if (sg > m.lip_g * (1.0 + 1e-9))
    r.warnings.push_back("sampled Lipschitz quotient of g exceeds the declared lip_g");
  return r;
}

}  // namespace fss
