#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fss/errors.hpp"
#include "fss/noise.hpp"

using namespace fss;

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// One-sample Kolmogorov-Smirnov statistic against N(0, var).
double ks_statistic(std::vector<double> xs, double var) {
  std::sort(xs.begin(), xs.end());
  const double sd = std::sqrt(var);
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = std_normal_cdf(xs[i] / sd);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("derive_seed separates streams deterministically") {
  CHECK(derive_seed(42, 0) == derive_seed(42, 0));
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("generate_wiener determinism and reconstruction") {
  const WienerPath a = generate_wiener(0.0, 1.0, 0.01, 1, 7);
  const WienerPath b = generate_wiener(0.0, 1.0, 0.01, 1, 7);
  CHECK(a.increments == b.increments);
  CHECK(a.steps() == 100);

  // cumulative sum reconstructs W(t) - W(0)
  double acc = 0.0;
  for (int i = 0; i < a.steps(); ++i) {
    acc += a.increments(i, 0);
    CHECK(a.value(0, 0.01 * (i + 1)) == doctest::Approx(acc).epsilon(1e-12));
  }
  CHECK(a.value(0, 0.0) == 0.0);

  CHECK_THROWS_AS(generate_wiener(1.0, 0.0, 0.01, 1, 7), Error);
  CHECK_THROWS_AS(generate_wiener(0.0, 1.0, -0.01, 1, 7), Error);
  CHECK_THROWS_AS(a.index_of(2.0), Error);
  CHECK_THROWS_AS(a.index_of(0.0051), Error);
}

TEST_CASE("wiener increments have Gaussian moments") {
  const double dt = 0.01;
  const WienerPath p = generate_wiener(0.0, 1000.0, dt, 1, 123);
  const int n = p.steps();
  REQUIRE(n == 100000);
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) mean += p.increments(i, 0);
  mean /= n;
  for (int i = 0; i < n; ++i) var += std::pow(p.increments(i, 0) - mean, 2);
  var /= n - 1;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(dt / n));
  CHECK(std::abs(var - dt) / dt < 0.05);
}

TEST_CASE("shift obeys the flow property bit-exactly") {
  const WienerPath p = generate_wiener(-2.0, 2.0, 0.1, 2, 9);
  const WienerPath s0 = shift_path(p, 0.0);
  CHECK(s0.t0 == p.t0);
  CHECK(s0.increments == p.increments);

  const WienerPath two = shift_path(shift_path(p, 0.3), 0.2);
  const WienerPath one = shift_path(p, 0.5);
  CHECK(two.t0 == one.t0);
  CHECK(two.increments == one.increments);
  CHECK(one.value(0, 0.0) == 0.0);  // zero at its own origin by convention

  CHECK_THROWS_AS(shift_path(p, 0.05), Error);  // not a grid multiple
}

TEST_CASE("fast OU path is zero without noise and stationary with it") {
  SpectralOperator op = build_operator(1.2, 4);
  const double eps = 0.01;

  const WienerPath w0 = generate_wiener(0.0, 1.0, 1e-3, 4, 5);
  const OUPath zero = ou_fast_stationary(op, eps, 0.0, w0);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  // dt large against the relaxation time 1/(lambda_1/eps), so consecutive
  // samples are effectively independent; the recursion stays exact.
  const double dt = 0.1;
  const WienerPath w = generate_wiener(0.0, 10000.0, dt, 4, 31);
  const OUPath eta = ou_fast_stationary(op, eps, 0.1, w);
  const int n = eta.steps() + 1;
  REQUIRE(n > 100000);

  const double expect = 0.1 * 0.1 / (2.0 * op.lambda1());
  std::vector<double> xs(n);
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    xs[i] = eta.values(i, 0);
    var += xs[i] * xs[i];
  }
  var /= n;
  CHECK(expect == doctest::Approx(0.003801).epsilon(1e-3));
  CHECK(std::abs(var - expect) / expect < 0.05);

  // Kolmogorov-Smirnov against the stationary law at significance 0.01.
  CHECK(ks_statistic(xs, expect) < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fast OU autocorrelation decays at lambda_1/eps") {
  SpectralOperator op = build_operator(1.2, 1);
  const double eps = 0.01, dt = 1e-3, tau = 0.01;
  const WienerPath w = generate_wiener(0.0, 200.0, dt, 1, 77);
  const OUPath eta = ou_fast_stationary(op, eps, 0.1, w);
  const int lag = static_cast<int>(tau / dt);
  const int n = eta.steps() + 1 - lag;
  double c0 = 0.0, cl = 0.0;
  for (int i = 0; i < n; ++i) {
    c0 += eta.values(i, 0) * eta.values(i, 0);
    cl += eta.values(i, 0) * eta.values(i + lag, 0);
  }
  const double expect = std::exp(-op.lambda1() * tau / eps);
  CHECK(std::abs(cl / c0 - expect) < 0.10 * expect);
}

TEST_CASE("slow OU stationary variance and autocorrelation for J=-1") {
  Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(1, 1);
  const double dt = 5.0;  // >> relaxation time, near-independent samples
  const WienerPath w = generate_wiener(0.0, 500000.0, dt, 1, 13);
  const OUPath xi = ou_slow_stationary(J, 0.1, w);
  const int n = xi.steps() + 1;
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += xi.values(i, 0) * xi.values(i, 0);
  var /= n;
  CHECK(std::abs(var - 0.005) / 0.005 < 0.05);

  const WienerPath w2 = generate_wiener(0.0, 5000.0, 0.01, 1, 14);
  const OUPath xi2 = ou_slow_stationary(J, 0.1, w2);
  const int lag = 50;  // tau = 0.5
  const int m = xi2.steps() + 1 - lag;
  double c0 = 0.0, cl = 0.0;
  for (int i = 0; i < m; ++i) {
    c0 += xi2.values(i, 0) * xi2.values(i, 0);
    cl += xi2.values(i, 0) * xi2.values(i + lag, 0);
  }
  const double rate_hat = -std::log(cl / c0) / 0.5;
  CHECK(std::abs(rate_hat - 1.0) < 0.10);

  const OUPath silent = ou_slow_stationary(J, 0.0, w2);
  CHECK(silent.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unstable slow operator is rejected") {
  Eigen::MatrixXd J(1, 1);
  J << 0.5;
  const WienerPath w = generate_wiener(0.0, 1.0, 0.01, 1, 3);
  CHECK_THROWS_AS(ou_slow_stationary(J, 0.1, w), Error);
}

TEST_CASE("slow step data matches scalar closed forms") {
  Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(1, 1);
  const double dt = 0.05;
  const SlowStep s = slow_step_data(J, dt);
  CHECK(s.expJdt(0, 0) == doctest::Approx(std::exp(-dt)).epsilon(1e-12));
  CHECK(s.drift_gain(0, 0) == doctest::Approx(1.0 - std::exp(-dt)).epsilon(1e-10));
  const double gram = s.noise_gain(0, 0) * s.noise_gain(0, 0);
  CHECK(gram == doctest::Approx((1.0 - std::exp(-2.0 * dt)) / 2.0).epsilon(1e-8));
}

TEST_CASE("stationary covariance solves the Lyapunov equation") {
  Eigen::MatrixXd J(2, 2);
  J << -1.0, 0.7, 0.0, -2.0;
  const double sigma2 = 0.3;
  const Eigen::MatrixXd S = ou_stationary_covariance(J, sigma2);
  const Eigen::MatrixXd resid =
      J * S + S * J.transpose() + sigma2 * sigma2 * Eigen::MatrixXd::Identity(2, 2);
  CHECK(resid.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(S(0, 1) == doctest::Approx(S(1, 0)).epsilon(1e-12));

  const Eigen::MatrixXd S1 = ou_stationary_covariance(-Eigen::MatrixXd::Identity(1, 1), 0.1);
  CHECK(S1(0, 0) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("shifting an OU path relabels its window") {
  SpectralOperator op = build_operator(1.2, 2);
  const WienerPath w = generate_wiener(-1.0, 1.0, 0.01, 2, 21);
  const OUPath eta = ou_fast_stationary(op, 0.01, 0.1, w);
  const OUPath sh = shift_path(eta, 0.25);
  CHECK(sh.t0 == doctest::Approx(-1.25).epsilon(1e-12));
  CHECK(sh.at(-0.25) == eta.at(0.0));
  CHECK_THROWS_AS(sh.at(0.9), Error);
}

TEST_CASE("OU paths reject windows they do not cover") {
  SpectralOperator op = build_operator(1.2, 2);
  const WienerPath w = generate_wiener(0.0, 1.0, 0.01, 2, 1);
  const OUPath eta = ou_fast_stationary(op, 0.01, 0.1, w);
  CHECK_THROWS_AS(eta.at(-0.5), Error);
  CHECK_THROWS_AS(eta.at(1.5), Error);
}
