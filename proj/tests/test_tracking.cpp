#include <cmath>
#include <limits>

#include "doctest.h"
#include "fss/errors.hpp"
#include "fss/model.hpp"
#include "fss/tracking.hpp"

using namespace fss;

namespace {

struct Noise {
  WienerPath wf, ws;
  OUPath eta, xi;
};

Noise noise_window(const ModelSpec& m, const LPConfig& cfg, double t1, std::uint64_t seed) {
  const double t0 = std::ceil((effective_t_minus(m, cfg) + 1.0) / cfg.dt) * cfg.dt;
  Noise n;
  n.wf = generate_wiener(-t0, t1, cfg.dt, m.n_modes(), derive_seed(seed, 1));
  n.ws = generate_wiener(-t0, t1, cfg.dt, m.slow_dim(), derive_seed(seed, 2));
  n.eta = ou_fast_stationary(m.op, m.eps, m.sigma1, n.wf);
  n.xi = ou_slow_stationary(m.J, m.sigma2, n.ws);
  return n;
}

Eigen::VectorXd vscalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("tracking prefactor closed form") {
  const ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 16);
  CHECK(tracking_prefactor(m) == doctest::Approx(1.0100664553639722).epsilon(1e-12));
  CHECK(std::abs(tracking_prefactor(m) - 1.0101) < 1e-4);
}

TEST_CASE("projection is idempotent on the manifold") {
  const ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 16);
  LPConfig cfg;
  const Noise n = noise_window(m, cfg, 0.5, 3);
  const ManifoldSolution sol = lp_solve(m, n.eta, n.xi, vscalar(2.0), cfg);

  const ProjectionResult fib =
      project_to_manifold(m, n.eta, n.xi, sol.H_value, vscalar(2.0), cfg, ProjectionMode::fiber);
  CHECK((fib.U0 - sol.H_value).norm() < 1e-12);
  CHECK(fib.V0(0) == 2.0);

  const ProjectionResult pic = project_to_manifold(m, n.eta, n.xi, sol.H_value, vscalar(2.0), cfg,
                                                   ProjectionMode::integral);
  CHECK((pic.V0 - fib.V0).norm() < 1e-6);
  CHECK(pic.iterations >= 1);
}

TEST_CASE("projection degenerate and deterministic cases") {
  ModelSpec flat = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 8);
  flat.f = [](const Eigen::VectorXd& u, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(u.size()).eval();
  };
  flat.lip_f = 0.0;
  LPConfig cfg;
  const Noise n = noise_window(flat, cfg, 0.5, 4);
  const ProjectionResult p =
      project_to_manifold(flat, n.eta, n.xi, vscalar(0.7).replicate(8, 1), vscalar(2.0), cfg,
                          ProjectionMode::fiber);
  CHECK(p.U0.norm() == 0.0);
  CHECK(p.V0(0) == 2.0);

  const ModelSpec det = make_example2(1.2, 0.01, 0.0, 0.0, 1.0, 16);
  const Noise nd = noise_window(det, cfg, 0.5, 5);
  const ProjectionResult q = project_to_manifold(det, nd.eta, nd.xi, Eigen::VectorXd::Zero(16),
                                                 vscalar(2.0), cfg, ProjectionMode::fiber);
  const Eigen::VectorXd h0 = h0_leading_order(det, vscalar(2.0));
  CHECK((q.U0 - h0).norm() / h0.norm() < 0.02);
}

TEST_CASE("zero offset gives a trivially passing report") {
  const ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 16);
  LPConfig cfg;
  const Noise n = noise_window(m, cfg, 0.5, 6);
  const ManifoldSolution sol = lp_solve(m, n.eta, n.xi, vscalar(2.0), cfg);
  const TrackingReport rep = tracking_verify(m, n.eta, n.xi, sol.H_value, vscalar(2.0), 0.5,
                                             cfg.dt, cfg, ProjectionMode::fiber);
  CHECK(rep.pass);
  CHECK(rep.gaps.maxCoeff() < 1e-10);
  CHECK(std::isinf(rep.fitted_rate));
}

TEST_CASE("offset orbit collapses at least at rate mu/eps") {
  const ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 16);
  LPConfig cfg;
  const Noise n = noise_window(m, cfg, 0.5, 8);
  Eigen::VectorXd U0 = Eigen::VectorXd::Zero(16);
  for (int k = 0; k < 16; ++k) U0(k) = 1.0 / (k + 1.0);
  const TrackingReport rep =
      tracking_verify(m, n.eta, n.xi, U0, vscalar(2.0), 0.5, cfg.dt, cfg);
  CHECK(rep.pass);
  CHECK(rep.bound_rate == doctest::Approx(27.542415214741955).epsilon(1e-10));
  CHECK(rep.bound_prefactor == doctest::Approx(tracking_prefactor(m)).epsilon(1e-14));
  CHECK(rep.fitted_rate >= 0.9 * rep.bound_rate);
  CHECK(rep.gaps.minCoeff() >= 0.0);
  CHECK(rep.projection == "integral");
  for (int i = 0; i <= 10; ++i) {
    const double t = rep.times(i);
    const double env = rep.bound_prefactor * std::exp(-rep.bound_rate * t) * rep.gaps(0) * 1.10;
    CHECK(rep.gaps(i) <= std::max(env, 1e-12));
  }
}

TEST_CASE("halving eps roughly doubles the fitted rate") {
  double rate_2 = 0.0, rate_1 = 0.0;
  for (double eps : {0.02, 0.01}) {
    const ModelSpec m = make_example2(1.2, eps, 0.1, 0.1, 1.0, 16);
    LPConfig cfg;
    const Noise n = noise_window(m, cfg, 1.0, 9);
    Eigen::VectorXd U0 = Eigen::VectorXd::Constant(16, 0.5);
    const TrackingReport rep =
        tracking_verify(m, n.eta, n.xi, U0, vscalar(2.0), 1.0, cfg.dt, cfg);
    (eps == 0.02 ? rate_2 : rate_1) = rep.fitted_rate;
  }
  CHECK(rate_1 >= 2.0 * 0.8 * rate_2);
}

TEST_CASE("a horizon too short to resolve the decay is rejected") {
  const ModelSpec m = make_example2(1.2, 0.01, 0.1, 0.1, 1.0, 16);
  LPConfig cfg;
  const Noise n = noise_window(m, cfg, 0.5, 10);
  CHECK_THROWS_AS(tracking_verify(m, n.eta, n.xi, Eigen::VectorXd::Ones(16), vscalar(2.0),
                                  0.5 * m.eps / 0.27542415214741955, cfg.dt, cfg),
                  Error);
}
