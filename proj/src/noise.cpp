#include "fss/noise.hpp"

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "fss/errors.hpp"

namespace fss {

namespace {

constexpr double kGridTol = 1e-9;

int grid_index(double t, double t0, double dt, int steps, const char* who) {
  const double x = (t - t0) / dt;
  const int i = static_cast<int>(std::lround(x));
  require(std::abs(x - i) < kGridTol * std::max(1.0, std::abs(x)) + kGridTol,
          ErrorCode::window_underflow, std::string(who) + ": time is off the grid");
  require(i >= 0 && i <= steps, ErrorCode::window_underflow,
          std::string(who) + ": time outside the generated window");
  return i;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int WienerPath::index_of(double t) const { return grid_index(t, t0, dt, steps(), "WienerPath"); }

double WienerPath::value(int dim, double t) const {
  const int i = index_of(t);
  const int i0 = index_of(0.0);
  double s = 0.0;
  if (i > i0)
    for (int j = i0; j < i; ++j) s += increments(j, dim);
  else
    for (int j = i; j < i0; ++j) s -= increments(j, dim);
  return s;
}

WienerPath generate_wiener(double t0, double t1, double dt, int dims, std::uint64_t seed) {
  require(dt > 0.0, ErrorCode::invalid_argument, "generate_wiener: dt must be positive");
  require(t0 < t1, ErrorCode::invalid_argument, "generate_wiener: t0 must be < t1");
  require(dims >= 1, ErrorCode::invalid_argument, "generate_wiener: dims must be >= 1");
  const double span = t1 - t0;
  const int steps = static_cast<int>(std::lround(span / dt));
  require(std::abs(steps * dt - span) < kGridTol * std::max(1.0, span), ErrorCode::invalid_argument,
          "generate_wiener: dt must divide t1-t0");

  WienerPath p;
  p.t0 = t0;
  p.dt = dt;
  p.seed = seed;
  p.increments.resize(steps, dims);
  std::mt19937_64 gen(derive_seed(seed, 0));
  std::normal_distribution<double> gauss(0.0, std::sqrt(dt));
  for (int i = 0; i < steps; ++i)
    for (int d = 0; d < dims; ++d) p.increments(i, d) = gauss(gen);
  return p;
}

WienerPath shift_path(const WienerPath& p, double s) {
  const double x = s / p.dt;
  require(std::abs(x - std::lround(x)) < kGridTol * std::max(1.0, std::abs(x)) + kGridTol,
          ErrorCode::invalid_argument, "shift_path: shift must be a grid multiple");
  WienerPath q = p;
  q.t0 = p.t0 - s;
  return q;
}

int OUPath::index_of(double t) const { return grid_index(t, t0, dt, steps(), "OUPath"); }

Eigen::VectorXd OUPath::at(double t) const { return values.row(index_of(t)).transpose(); }

OUPath ou_fast_stationary(const SpectralOperator& op, double eps, double sigma1,
                          const WienerPath& path) {
  require(eps > 0.0, ErrorCode::invalid_argument, "ou_fast_stationary: eps must be positive");
  require(sigma1 >= 0.0, ErrorCode::invalid_argument, "ou_fast_stationary: sigma1 must be >= 0");
  require(path.dims() == op.n_modes, ErrorCode::invalid_argument,
          "ou_fast_stationary: path dims must equal n_modes");

  const int n = op.n_modes;
  const int steps = path.steps();
  OUPath out;
  out.t0 = path.t0;
  out.dt = path.dt;
  out.noise_scale = sigma1 / std::sqrt(eps);
  out.rates = op.eigenvalues / eps;
  out.values.setZero(steps + 1, n);

  Eigen::VectorXd decay(n), inc_gain(n), init_std(n);
  for (int k = 0; k < n; ++k) {
    const double lam = op.eigenvalues(k);
    const double a = std::exp(-lam * path.dt / eps);
    decay(k) = a;
    const double q = sigma1 * sigma1 * (1.0 - a * a) / (2.0 * lam);  // exact step variance
    inc_gain(k) = std::sqrt(q / path.dt);
    init_std(k) = sigma1 * std::sqrt(1.0 / (2.0 * lam));
  }

  std::mt19937_64 gen(derive_seed(path.seed, 1));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < n; ++k) out.values(0, k) = init_std(k) * gauss(gen);
  for (int i = 0; i < steps; ++i)
    for (int k = 0; k < n; ++k)
      out.values(i + 1, k) = decay(k) * out.values(i, k) + inc_gain(k) * path.increments(i, k);
  return out;
}

bool is_stable(const Eigen::MatrixXd& J) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(J);
  return (es.eigenvalues().real().array() < 0.0).all();
}

SlowStep slow_step_data(const Eigen::MatrixXd& J, double dt) {
  const int m = static_cast<int>(J.rows());
  SlowStep s;
  s.expJdt = (J * dt).exp();
  // int_0^dt e^{J s} ds = J^{-1} (e^{J dt} - I) when J is invertible; Simpson
  // quadrature covers the general case and the Gramian below.
  const int nq = 64;
  const double h = dt / nq;
  Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i <= nq; ++i) {
    const double w = (i == 0 || i == nq) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const Eigen::MatrixXd e = (J * (i * h)).exp();
    drift += w * e;
    gram += w * (e * e.transpose());
  }
  drift *= h / 3.0;
  gram *= h / 3.0;
  s.drift_gain = drift;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    s.noise_gain = llt.matrixL();
  } else {
    // Semi-definite fallback via eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    s.noise_gain = es.eigenvectors() *
                   es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                   es.eigenvectors().transpose();
  }
  return s;
}

Eigen::MatrixXd ou_stationary_covariance(const Eigen::MatrixXd& J, double sigma2) {
  const int m = static_cast<int>(J.rows());
  // Vectorized Lyapunov solve: (I (x) J + J (x) I) vec(S) = -sigma2^2 vec(I).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * m, m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        A(i + m * j, k + m * j) += J(i, k);
        A(i + m * j, i + m * k) += J(j, k);
      }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m * m);
  for (int i = 0; i < m; ++i) rhs(i + m * i) = -sigma2 * sigma2;
  Eigen::VectorXd v = A.fullPivLu().solve(rhs);
  Eigen::MatrixXd S(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) S(i, j) = v(i + m * j);
  return 0.5 * (S + S.transpose());
}

OUPath ou_slow_stationary(const Eigen::MatrixXd& J, double sigma2, const WienerPath& path) {
  require(sigma2 >= 0.0, ErrorCode::invalid_argument, "ou_slow_stationary: sigma2 must be >= 0");
  require(J.rows() == J.cols() && J.rows() >= 1, ErrorCode::invalid_argument,
          "ou_slow_stationary: J must be square");
  require(path.dims() == J.rows(), ErrorCode::invalid_argument,
          "ou_slow_stationary: path dims must equal dim(J)");
  require(is_stable(J), ErrorCode::hypothesis_violation,
          "ou_slow_stationary: J is not stable (H1 forward-decay violated)");

  const int m = static_cast<int>(J.rows());
  const int steps = path.steps();
  const SlowStep step = slow_step_data(J, path.dt);
  const Eigen::MatrixXd cov = ou_stationary_covariance(J, sigma2);
  Eigen::LLT<Eigen::MatrixXd> llt(cov + 1e-300 * Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd init_gain = sigma2 > 0.0 ? Eigen::MatrixXd(llt.matrixL())
                                           : Eigen::MatrixXd::Zero(m, m);

  OUPath out;
  out.t0 = path.t0;
  out.dt = path.dt;
  out.noise_scale = sigma2;
  Eigen::EigenSolver<Eigen::MatrixXd> es(J);
  out.rates = -es.eigenvalues().real();
  out.values.setZero(steps + 1, m);

  std::mt19937_64 gen(derive_seed(path.seed, 2));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(m);
  for (int d = 0; d < m; ++d) z(d) = gauss(gen);
  out.values.row(0) = (init_gain * z).transpose();
  const double root_dt = std::sqrt(path.dt);
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd xi = out.values.row(i).transpose();
    const Eigen::VectorXd dw = path.increments.row(i).transpose() / root_dt;
    out.values.row(i + 1) = (step.expJdt * xi + sigma2 * step.noise_gain * dw).transpose();
  }
  return out;
}

OUPath shift_path(const OUPath& p, double s) {
  const double x = s / p.dt;
  require(std::abs(x - std::lround(x)) < kGridTol * std::max(1.0, std::abs(x)) + kGridTol,
          ErrorCode::invalid_argument, "shift_path: shift must be a grid multiple");
  OUPath q = p;
  q.t0 = p.t0 - s;
  return q;
}

}  // namespace fss
