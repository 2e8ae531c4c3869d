#include "fss/simulate.hpp"

#include <cmath>

#include "fss/errors.hpp"

namespace fss {

namespace {

struct FastStep {
  Eigen::VectorXd decay;       // e^{-lambda_k dt/eps}
  Eigen::VectorXd drift_gain;  // (1 - decay)/lambda_k, the exact (1/eps) kernel integral
  Eigen::VectorXd noise_gain;  // sqrt(sigma1^2 (1-decay^2)/(2 lambda_k) / dt)
};

FastStep fast_step_data(const ModelSpec& m, double dt) {
  const int n = m.n_modes();
  FastStep s;
  s.decay.resize(n);
  s.drift_gain.resize(n);
  s.noise_gain.resize(n);
  for (int k = 0; k < n; ++k) {
    const double lam = m.op.eigenvalues(k);
    const double a = std::exp(-lam * dt / m.eps);
    s.decay(k) = a;
    s.drift_gain(k) = (1.0 - a) / lam;
    s.noise_gain(k) = std::sqrt(m.sigma1 * m.sigma1 * (1.0 - a * a) / (2.0 * lam) / dt);
  }
  return s;
}

int step_count(double T, double dt) {
  require(dt > 0.0, ErrorCode::invalid_argument, "simulate: dt must be positive");
  require(T > 0.0, ErrorCode::invalid_argument, "simulate: T must be positive");
  const int n = static_cast<int>(std::lround(T / dt));
  require(n >= 1 && std::abs(n * dt - T) < 1e-9 * std::max(1.0, T), ErrorCode::invalid_argument,
          "simulate: dt must divide T");
  return n;
}

void check_finite(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double t) {
  require(u.allFinite() && v.allFinite(), ErrorCode::internal,
          "simulate: non-finite state at t = " + std::to_string(t));
}

}  // namespace

Trajectory simulate_full(const ModelSpec& m, const WienerPath& w_fast, const WienerPath& w_slow,
                         const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double T, double dt,
                         double t_start) {
  const int n_steps = step_count(T, dt);
  const int n = m.n_modes();
  const int md = m.slow_dim();
  require(u0.size() == n && v0.size() == md, ErrorCode::invalid_argument,
          "simulate_full: initial state dimensions do not match the model");

  require(std::abs(w_fast.dt - dt) < 1e-12 && std::abs(w_slow.dt - dt) < 1e-12,
          ErrorCode::invalid_argument, "simulate_full: Wiener paths must share the grid step");

  Trajectory tr;
  const double lam_max = m.op.eigenvalues(n - 1);
  if (dt > m.eps / lam_max)
    tr.warnings.push_back("simulate_full: dt exceeds eps/lambda_N; drift resolution is coarse");

  const FastStep fs = fast_step_data(m, dt);
  const SlowStep ss = slow_step_data(m.J, dt);
  const double root_dt = std::sqrt(dt);

  tr.times.resize(n_steps + 1);
  tr.fast.resize(n_steps + 1, n);
  tr.slow.resize(n_steps + 1, md);
  tr.fast.row(0) = u0.transpose();
  tr.slow.row(0) = v0.transpose();

  Eigen::VectorXd u = u0, v = v0;
  int iw_f = w_fast.index_of(t_start);
  int iw_s = w_slow.index_of(t_start);
  // Windows must cover the whole run, not just the first step.
  w_fast.index_of(t_start + n_steps * dt);
  w_slow.index_of(t_start + n_steps * dt);

  for (int i = 0; i < n_steps; ++i) {
    const double t = t_start + i * dt;
    tr.times(i) = t;
    const Eigen::VectorXd fu = m.f(u, v);
    const Eigen::VectorXd gu = m.g(u, v, m.param_d);
    const Eigen::VectorXd dwf = w_fast.increments.row(iw_f + i).transpose();
    const Eigen::VectorXd dws = w_slow.increments.row(iw_s + i).transpose() / root_dt;
    u = fs.decay.cwiseProduct(u) + fs.drift_gain.cwiseProduct(fu) + fs.noise_gain.cwiseProduct(dwf);
    v = ss.expJdt * v + ss.drift_gain * gu + m.sigma2 * ss.noise_gain * dws;
    if ((i & 63) == 0) check_finite(u, v, t + dt);
    tr.fast.row(i + 1) = u.transpose();
    tr.slow.row(i + 1) = v.transpose();
  }
  tr.times(n_steps) = t_start + n_steps * dt;
  check_finite(u, v, tr.times(n_steps));
  return tr;
}

Trajectory simulate_random(const ModelSpec& m, const OUPath& eta, const OUPath& xi,
                           const Eigen::VectorXd& U0, const Eigen::VectorXd& V0, double T,
                           double dt, double t_start) {
  const int n_steps = step_count(T, dt);
  const int n = m.n_modes();
  const int md = m.slow_dim();
  require(U0.size() == n && V0.size() == md, ErrorCode::invalid_argument,
          "simulate_random: initial state dimensions do not match the model");
  require(std::abs(eta.dt - dt) < 1e-12 && std::abs(xi.dt - dt) < 1e-12,
          ErrorCode::invalid_argument, "simulate_random: OU paths must share the grid step");

  Trajectory tr;
  const FastStep fs = fast_step_data(m, dt);
  const SlowStep ss = slow_step_data(m.J, dt);

  tr.times.resize(n_steps + 1);
  tr.fast.resize(n_steps + 1, n);
  tr.slow.resize(n_steps + 1, md);
  tr.fast.row(0) = U0.transpose();
  tr.slow.row(0) = V0.transpose();

  Eigen::VectorXd U = U0, V = V0;
  const int ie = eta.index_of(t_start);
  const int ix = xi.index_of(t_start);
  eta.index_of(t_start + n_steps * dt);
  xi.index_of(t_start + n_steps * dt);

  for (int i = 0; i < n_steps; ++i) {
    const double t = t_start + i * dt;
    tr.times(i) = t;
    const Eigen::VectorXd ue = U + eta.at_index(ie + i);
    const Eigen::VectorXd vx = V + xi.at_index(ix + i);
    const Eigen::VectorXd fu = m.f(ue, vx);
    const Eigen::VectorXd gu = m.g(ue, vx, m.param_d);
    U = fs.decay.cwiseProduct(U) + fs.drift_gain.cwiseProduct(fu);
    V = ss.expJdt * V + ss.drift_gain * gu;
    if ((i & 63) == 0) check_finite(U, V, t + dt);
    tr.fast.row(i + 1) = U.transpose();
    tr.slow.row(i + 1) = V.transpose();
  }
  tr.times(n_steps) = t_start + n_steps * dt;
  check_finite(U, V, tr.times(n_steps));
  return tr;
}

Trajectory simulate_reduced(const ModelSpec& m, const ManifoldEval& H, const OUPath& eta,
                            const OUPath& xi, const WienerPath& w_slow,
                            const Eigen::VectorXd& v0, double d, double T, double dt,
                            double t_start) {
  const int n_steps = step_count(T, dt);
  const int md = m.slow_dim();
  require(v0.size() == md, ErrorCode::invalid_argument,
          "simulate_reduced: v0 dimension does not match the model");
  require(std::abs(w_slow.dt - dt) < 1e-12 && std::abs(eta.dt - dt) < 1e-12 &&
              std::abs(xi.dt - dt) < 1e-12,
          ErrorCode::invalid_argument, "simulate_reduced: noise paths must share the grid step");

  Trajectory tr;
  const SlowStep ss = slow_step_data(m.J, dt);
  const double root_dt = std::sqrt(dt);

  tr.times.resize(n_steps + 1);
  tr.fast.resize(n_steps + 1, 0);
  tr.slow.resize(n_steps + 1, md);
  tr.slow.row(0) = v0.transpose();

  Eigen::VectorXd v = v0;
  const int ie = eta.index_of(t_start);
  const int ix = xi.index_of(t_start);
  const int iw = w_slow.index_of(t_start);
  eta.index_of(t_start + n_steps * dt);
  xi.index_of(t_start + n_steps * dt);
  w_slow.index_of(t_start + n_steps * dt);

  for (int i = 0; i < n_steps; ++i) {
    const double t = t_start + i * dt;
    tr.times(i) = t;
    const Eigen::VectorXd h = H(t, v);
    const Eigen::VectorXd gu = m.g(h + eta.at_index(ie + i), v + xi.at_index(ix + i), d);
    const Eigen::VectorXd dws = w_slow.increments.row(iw + i).transpose() / root_dt;
    v = ss.expJdt * v + ss.drift_gain * gu + m.sigma2 * ss.noise_gain * dws;
    if ((i & 63) == 0) check_finite(v, v, t + dt);
    tr.slow.row(i + 1) = v.transpose();
  }
  tr.times(n_steps) = t_start + n_steps * dt;
  check_finite(v, v, tr.times(n_steps));
  return tr;
}

}  // namespace fss
