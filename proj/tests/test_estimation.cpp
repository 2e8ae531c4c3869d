#include <cmath>

#include "doctest.h"
#include "fss/errors.hpp"
#include "fss/estimation.hpp"
#include "fss/model.hpp"

using namespace fss;

namespace {

Eigen::VectorXd vscalar(double v) { return Eigen::VectorXd::Constant(1, v); }

EstimationProblem synth(double eps, double d_true, double T, int n_mc, ObsSource src,
                        std::uint64_t seed = 101) {
  const ModelSpec m = make_example2(1.2, eps, 0.1, 0.1, d_true, 16);
  return make_synthetic_problem(m, d_true, 0.2, 2.0, vscalar(2.0), T, 1e-3, n_mc, seed, src);
}

}  // namespace

TEST_CASE("objective is zero under self-consistent observations") {
  const EstimationProblem p = synth(0.01, 1.0, 1.0, 4, ObsSource::reduced_system);
  const ObjectiveValue at_true = objective(p, 1.0);
  CHECK(at_true.mean < 1e-24);
  CHECK(objective(p, 0.5).mean > 0.0);
  CHECK(objective(p, 1.5).mean >= 0.0);
  CHECK_THROWS_AS(objective(p, 5.0), Error);
}

TEST_CASE("objective is flat when d has no effect") {
  ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.0, 1.0, 16);
  m.g = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    return Eigen::VectorXd::Zero(1).eval();
  };
  m.lip_g = 0.0;
  const EstimationProblem p = make_synthetic_problem(m, 1.0, 0.2, 2.0, vscalar(2.0), 0.5, 1e-3,
                                                     3, 77, ObsSource::full_system);
  const double f1 = objective(p, 0.3).mean;
  const double f2 = objective(p, 1.7).mean;
  CHECK(f1 == f2);
}

TEST_CASE("grid minimum lands near the true parameter") {
  const EstimationProblem p = synth(0.01, 1.0, 1.0, 10, ObsSource::full_system);
  const EstimationResult r = estimate(p, 21, 0);
  int best = 0;
  for (int i = 1; i < 21; ++i)
    if (r.curve_F(i) < r.curve_F(best)) best = i;
  const double cell = (2.0 - 0.2) / 20.0;
  CHECK(std::abs(r.curve_d(best) - 1.0) <= 2.0 * cell + 1e-12);
  CHECK(r.curve_F.minCoeff() >= 0.0);
  CHECK(r.d_hat >= 0.2);
  CHECK(r.d_hat <= 2.0);
}

TEST_CASE("golden section resolves an exactly quadratic objective") {
  // g constant in the state makes v(d) - v(d*) deterministic and linear in
  // d - d*, so F is an exact parabola with root at d*.
  ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.3, 4);
  m.g = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double d) {
    return Eigen::VectorXd::Constant(1, d).eval();
  };
  m.lip_g = 0.0;
  const EstimationProblem p = make_synthetic_problem(m, 1.3, 0.2, 2.0, vscalar(2.0), 0.5, 1e-3,
                                                     2, 13, ObsSource::reduced_system);
  const EstimationResult r = estimate(p, 21, 40);
  CHECK(std::abs(r.d_hat - 1.3) < 1e-6);
  CHECK(r.F_min < 1e-12);
  CHECK(r.objective_evals == 21 + 2 + 40);
}

TEST_CASE("synthetic recovery from full-system observations") {
  const EstimationProblem p = synth(0.01, 1.0, 2.0, 50, ObsSource::full_system);
  const EstimationResult r = estimate(p, 21, 20);
  CHECK(std::abs(r.d_hat - 1.0) <= 0.1);
}

TEST_CASE("recovery error does not grow as eps shrinks") {
  double err_coarse = 0.0, err_fine = 0.0;
  for (double eps : {0.1, 0.01}) {
    const EstimationProblem p = synth(eps, 1.0, 1.0, 20, ObsSource::full_system, 303);
    const EstimationResult r = estimate(p, 21, 20);
    (eps == 0.1 ? err_coarse : err_fine) = std::abs(r.d_hat - 1.0);
  }
  CHECK(err_fine <= err_coarse + 0.02);
}

TEST_CASE("slow drift is linear in d with analytic gradient") {
  const ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 16);
  Eigen::VectorXd u(16), v = vscalar(0.7);
  for (int k = 0; k < 16; ++k) u(k) = 0.1 / (k + 1.0);
  const Eigen::VectorXd analytic = m.g(u, v, 1.0);  // 0.01 sin(.) per unit d
  const double h = 1e-5;
  const Eigen::VectorXd fd = (m.g(u, v, 1.0 + h) - m.g(u, v, 1.0 - h)) / (2.0 * h);
  CHECK((fd - analytic).norm() <= 1e-7 * std::max(1.0, analytic.norm()));
  CHECK(((m.g(u, v, 2.0) - m.g(u, v, 0.0)) / 2.0 - analytic).norm() < 1e-14);
}

TEST_CASE("error bound collapses in the self-consistent setting") {
  const EstimationProblem p = synth(0.01, 1.0, 1.0, 4, ObsSource::reduced_system);
  const EstimationResult r = estimate(p, 21, 30);
  const ErrorBoundReport b = r.error_components;
  CHECK(b.informative);
  CHECK(b.G_half > 1e-12);
  CHECK(b.eps_term < 1e-18);  // u0 placed on the manifold up to roundoff
  CHECK(b.fast_term < 1e-14);
  CHECK(b.bound < 1e-4);
}

TEST_CASE("eps term of the bound is linear in eps") {
  double term_1 = 0.0, term_2 = 0.0;
  for (double eps : {0.01, 0.02}) {
    ModelSpec m = make_example2(1.2, eps, 0.0, 0.1, 1.0, 16);
    EstimationProblem p = make_synthetic_problem(m, 1.0, 0.2, 2.0, vscalar(2.0), 0.5, 1e-3, 2,
                                                 55, ObsSource::reduced_system);
    for (auto& u : p.u0) u.array() += 0.1;
    EstimationResult r;
    r.d_hat = 1.0;
    const ErrorBoundReport b = error_bound_report(p, r);
    (eps == 0.01 ? term_1 : term_2) = b.eps_term;
  }
  CHECK(term_2 == doctest::Approx(2.0 * term_1).epsilon(1e-9));
}

TEST_CASE("more Monte Carlo realizations do not hurt the estimate") {
  double err10 = 0.0, err200 = 0.0, se10 = 0.0;
  for (int n_mc : {10, 50, 200}) {
    const EstimationProblem p = synth(0.01, 1.0, 1.0, n_mc, ObsSource::full_system, 909);
    const EstimationResult r = estimate(p, 11, 15);
    const double err = std::abs(r.d_hat - 1.0);
    if (n_mc == 10) {
      err10 = err;
      se10 = r.curve_se.maxCoeff();
    }
    if (n_mc == 200) err200 = err;
    CHECK(err <= 0.1);
  }
  CHECK(err200 <= err10 + 2.0 * std::max(se10, 0.01));
}
