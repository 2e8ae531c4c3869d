#include "fss/manifold.hpp"

#include <cmath>

#include "fss/errors.hpp"

namespace fss {

double effective_t_minus(const ModelSpec& m, const LPConfig& cfg) {
  const double mu = hypothesis_check(m).mu;
  const double needed = 3.0 * m.eps * std::log(1.0 / cfg.tol) / mu;
  return std::max(cfg.t_minus, needed);
}

double weighted_sup_norm(const Trajectory& z, double weight_rate) {
  double best = 0.0;
  for (int i = 0; i <= z.steps(); ++i) {
    const double w = std::exp(weight_rate * z.times(i));
    best = std::max(best, w * (z.fast_at(i).norm() + z.slow_at(i).norm()));
  }
  return best;
}

namespace {

Trajectory zero_path(const ModelSpec& m, double t_minus, double dt) {
  const int n_steps = static_cast<int>(std::lround(t_minus / dt));
  require(n_steps >= 1, ErrorCode::invalid_argument, "lp: empty past window");
  Trajectory z;
  z.times.resize(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) z.times(i) = (i - n_steps) * dt;
  z.fast.setZero(n_steps + 1, m.n_modes());
  z.slow.setZero(n_steps + 1, m.slow_dim());
  return z;
}

Trajectory diff_path(const Trajectory& a, const Trajectory& b) {
  Trajectory d = a;
  d.fast -= b.fast;
  d.slow -= b.slow;
  return d;
}

}  // namespace

Trajectory lp_iterate(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                      const Eigen::VectorXd& V0, const Trajectory& z) {
  const int n_steps = z.steps();
  const int n = m.n_modes();
  const double dt = z.times(1) - z.times(0);

  // Drift evaluations along the candidate path (left endpoints).
  Eigen::MatrixXd fvals(n_steps, n);
  Eigen::MatrixXd gvals(n_steps, m.slow_dim());
  const int ie = eta.index_of(z.times(0));
  const int ix = xi.index_of(z.times(0));
  eta.index_of(0.0);
  xi.index_of(0.0);
  for (int i = 0; i < n_steps; ++i) {
    const Eigen::VectorXd ue = z.fast_at(i) + eta.at_index(ie + i);
    const Eigen::VectorXd vx = z.slow_at(i) + xi.at_index(ix + i);
    fvals.row(i) = m.f(ue, vx).transpose();
    gvals.row(i) = m.g(ue, vx, m.param_d).transpose();
  }

  Trajectory out;
  out.times = z.times;
  out.fast.setZero(n_steps + 1, n);
  out.slow.setZero(n_steps + 1, m.slow_dim());

  // Fast component: U(t) = (1/eps) int_{-T_-}^t e^{A (t-s)/eps} f ds, built
  // forward with the exact per-mode kernel over each step.
  Eigen::VectorXd decay(n), gain(n);
  for (int k = 0; k < n; ++k) {
    const double lam = m.op.eigenvalues(k);
    decay(k) = std::exp(-lam * dt / m.eps);
    gain(k) = (1.0 - decay(k)) / lam;
  }
  Eigen::VectorXd U = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n_steps; ++i) {
    U = decay.cwiseProduct(U) + gain.cwiseProduct(fvals.row(i).transpose());
    out.fast.row(i + 1) = U.transpose();
  }

  // Slow component: V(t) = e^{Jt} V0 + int_0^t e^{J(t-s)} g ds, t <= 0, built
  // backward from V(0) = V0.
  const SlowStep ss = slow_step_data(m.J, dt);
  const Eigen::MatrixXd back = ss.expJdt.inverse();
  Eigen::VectorXd V = V0;
  out.slow.row(n_steps) = V.transpose();
  for (int i = n_steps - 1; i >= 0; --i) {
    V = back * (V - ss.drift_gain * gvals.row(i).transpose());
    out.slow.row(i) = V.transpose();
  }
  return out;
}

ManifoldSolution lp_solve(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                          const Eigen::VectorXd& V0, const LPConfig& cfg) {
  require(cfg.tol > 0.0, ErrorCode::invalid_argument, "lp_solve: tol must be positive");
  const HypothesisReport rep = hypothesis_check(m);
  ManifoldSolution sol;
  if (!rep.gap_ok) {
    require(cfg.override_gap, ErrorCode::hypothesis_violation,
            "lp_solve: gap condition H3 fails for the declared constants");
    sol.warnings.push_back("lp_solve: gap condition fails; proceeding on override");
  }
  const double t_minus = effective_t_minus(m, cfg);
  if (cfg.t_minus < m.eps * std::log(1.0 / cfg.tol) / rep.mu)
    sol.warnings.push_back("lp_solve: configured t_minus is short for the weight; extended");
  const double weight_rate = (cfg.beta != 0.0) ? -cfg.beta : rep.mu / m.eps;

  Trajectory z = zero_path(m, t_minus, cfg.dt);
  sol.V0 = V0;
  double prev_delta = -1.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    Trajectory next = lp_iterate(m, eta, xi, V0, z);
    const double delta = weighted_sup_norm(diff_path(next, z), weight_rate);
    if (prev_delta > 0.0) sol.contraction_estimate = delta / prev_delta;
    prev_delta = delta;
    z = std::move(next);
    sol.iterations = it;
    if (delta < cfg.tol) {
      sol.z_path = std::move(z);
      sol.H_value = sol.z_path.fast_at(sol.z_path.steps());
      return sol;
    }
  }
  throw Error(ErrorCode::no_convergence,
              "lp_solve: no convergence in " + std::to_string(cfg.max_iter) +
                  " iterations (last contraction estimate " +
                  std::to_string(sol.contraction_estimate) + ")");
}

Eigen::VectorXd h0_leading_order(const ModelSpec& m, const Eigen::VectorXd& V0) {
  const int n = m.n_modes();
  const Eigen::VectorXd inv_lambda = m.op.eigenvalues.cwiseInverse();
  Eigen::VectorXd h = inv_lambda.cwiseProduct(m.f(Eigen::VectorXd::Zero(n), V0));
  // Damped fixed point for u-dependent f; converges under K < lambda_1 and
  // terminates immediately when f ignores its fast argument.
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd next = inv_lambda.cwiseProduct(m.f(h, V0));
    const double change = (next - h).norm();
    h = 0.5 * (h + next);
    if (change < 1e-14 * std::max(1.0, h.norm())) return h;
  }
  throw Error(ErrorCode::no_convergence, "h0_leading_order: fixed point did not converge");
}

double graph_lipschitz_bound(const ModelSpec& m) {
  const HypothesisReport rep = hypothesis_check(m);
  const double lambda1 = m.op.lambda1();
  const double k = m.lipschitz_k();
  const double denom =
      1.0 - k * (1.0 / (lambda1 - rep.mu) + m.eps / (m.eps * m.gamma2 + rep.mu));
  require(denom > 0.0, ErrorCode::hypothesis_violation,
          "graph_lipschitz_bound: bound denominator is not positive");
  return k / ((lambda1 - rep.mu) * denom);
}

LipschitzReport lipschitz_estimate(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                                   const std::vector<Eigen::VectorXd>& v_grid,
                                   const LPConfig& cfg, double slack) {
  require(v_grid.size() >= 3, ErrorCode::invalid_argument,
          "lipschitz_estimate: need at least 3 anchors");
  LipschitzReport rep;
  rep.graph_bound = graph_lipschitz_bound(m);
  Eigen::VectorXd prev_h;
  Eigen::VectorXd prev_v;
  for (const auto& v0 : v_grid) {
    const ManifoldSolution sol = lp_solve(m, eta, xi, v0, cfg);
    if (prev_h.size() > 0) {
      const double dv = (v0 - prev_v).norm();
      if (dv > 0.0)
        rep.measured_lip = std::max(rep.measured_lip, (sol.H_value - prev_h).norm() / dv);
    }
    prev_h = sol.H_value;
    prev_v = v0;
  }
  rep.pass = rep.measured_lip <= rep.graph_bound * (1.0 + slack);
  return rep;
}

ManifoldEval make_h0_evaluator(const ModelSpec& m) {
  return [m](double, const Eigen::VectorXd& v) { return h0_leading_order(m, v); };
}

ManifoldEval make_lp_evaluator(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                               const LPConfig& cfg) {
  return [m, eta, xi, cfg](double t, const Eigen::VectorXd& v) {
    const ManifoldSolution sol = lp_solve(m, shift_path(eta, t), shift_path(xi, t), v, cfg);
    return sol.H_value;
  };
}

}  // namespace fss
