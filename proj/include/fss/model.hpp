#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fss/spectral.hpp"

namespace fss {

// Fast nonlinearity in spectral coordinates: (fast coefficients, slow state) -> coefficients.
using FastDrift = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;
// Slow drift: (fast coefficients, slow state, parameter d) -> slow state.
using SlowDrift =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, double)>;

// Definition of the fast-slow system
//   du = (1/eps) A_alpha u dt + (1/eps) f(u,v) dt + (sigma1/sqrt(eps)) dW^1
//   dv = J v dt + g(u,v,d) dt + sigma2 dW^2
struct ModelSpec {
  SpectralOperator op;
  double eps = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  Eigen::MatrixXd J;      // m x m slow linear part
  double gamma2 = 0.0;    // declared decay constant of e^{Jt}
  FastDrift f;
  SlowDrift g;
  double lip_f = 0.0;     // declared Lipschitz constants
  double lip_g = 0.0;
  double param_d = 0.0;   // current value of the free slow-drift parameter

  int n_modes() const { return op.n_modes; }
  int slow_dim() const { return static_cast<int>(J.rows()); }
  double lipschitz_k() const { return std::max(lip_f, lip_g); }
};

// Built-in benchmark system on (-1,1) x R:
//   f(u,v) = 0.01 (sqrt(v^2+5) - sqrt(5)) * 1   (projected onto the sine basis)
//   g(u,v,a) = 0.01 a sin( integral of u )      with integral u = sum_k u_k c_k
//   J = -1, gamma2 = 1.
ModelSpec make_example2(double alpha, double eps, double sigma1, double sigma2, double a,
                        int n_modes);

// Linear model (f = g = 0) with a user-supplied stable J; the CLI's "custom" entry.
ModelSpec make_linear_model(double alpha, double eps, double sigma1, double sigma2,
                            const Eigen::MatrixXd& J, double gamma2, int n_modes);

struct HypothesisReport {
  bool gap_ok = false;
  double mu = 0.0;             // gamma2 / (2 lambda1 + gamma2)
  double lip_bound_rhs = 0.0;  // lambda1 gamma2 / (2 lambda1 + gamma2)
  double k_declared = 0.0;
  bool mu_in_unit = false;     // 0 < mu < 1
  bool k_below_mu_lambda = false;
  bool gap_minus_mu = false;   // lambda1 - mu > K
  bool j_decay_ok = false;     // sampled ||e^{Jt} v|| <= e^{-gamma2 t} ||v||, t in [0,T]
  double sampled_lip_f = 0.0;  // finite-difference spot checks of the declared constants
  double sampled_lip_g = 0.0;
  std::vector<std::string> warnings;
};

HypothesisReport hypothesis_check(const ModelSpec& m);

}  // namespace fss
