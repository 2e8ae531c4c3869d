#include "fss/estimation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "fss/errors.hpp"

namespace fss {

namespace {

void parallel_for(int n, int n_workers, const std::function<void(int)>& body) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 4;
  const int workers = std::min(n, n_workers > 0 ? n_workers : hw);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Trapezoidal integral of |a(t) - b(t)|^2 over the trajectory grid.
double gap_integral(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double dt) {
  const int n = static_cast<int>(a.rows());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * (a.row(i) - b.row(i)).squaredNorm();
  }
  return acc * dt;
}

Trajectory reduced_run(const EstimationProblem& p, int r, double d) {
  return simulate_reduced(p.m, p.H, p.eta[r], p.xi[r], p.w_slow[r], p.v0, d, p.T, p.dt);
}

}  // namespace

EstimationProblem make_synthetic_problem(const ModelSpec& m, double d_true, double d_lo,
                                         double d_hi, const Eigen::VectorXd& v0, double T,
                                         double dt, int n_mc, std::uint64_t seed,
                                         ObsSource source, int n_workers) {
  require(d_lo < d_hi, ErrorCode::invalid_argument, "make_synthetic_problem: empty range");
  require(T > 0.0 && dt > 0.0 && n_mc >= 1, ErrorCode::invalid_argument,
          "make_synthetic_problem: T, dt, n_mc must be positive");
  EstimationProblem p;
  p.m = m;
  p.d_lo = d_lo;
  p.d_hi = d_hi;
  p.T = T;
  p.dt = dt;
  p.n_mc = n_mc;
  p.seed = seed;
  p.n_workers = n_workers;
  p.v0 = v0;
  p.H = make_h0_evaluator(m);

  p.eta.resize(n_mc);
  p.xi.resize(n_mc);
  p.w_slow.resize(n_mc);
  p.u0.resize(n_mc);
  p.v_ob.resize(n_mc);

  const double pad = 1.0;  // stationary OU burn-in window before t = 0
  parallel_for(n_mc, n_workers, [&](int r) {
    const std::uint64_t sr = derive_seed(seed, static_cast<std::uint64_t>(r));
    const WienerPath wf = generate_wiener(-pad, T, dt, m.n_modes(), derive_seed(sr, 11));
    const WienerPath ws = generate_wiener(-pad, T, dt, m.slow_dim(), derive_seed(sr, 12));
    p.eta[r] = ou_fast_stationary(m.op, m.eps, m.sigma1, wf);
    p.xi[r] = ou_slow_stationary(m.J, m.sigma2, ws);
    p.w_slow[r] = ws;
    p.u0[r] = p.eta[r].at(0.0) + p.H(0.0, v0);
    ModelSpec mt = m;
    mt.param_d = d_true;
    if (source == ObsSource::full_system) {
      const Trajectory tr = simulate_full(mt, wf, ws, p.u0[r], v0, T, dt);
      p.v_ob[r] = tr.slow;
    } else {
      const Trajectory tr = simulate_reduced(mt, p.H, p.eta[r], p.xi[r], ws, v0, d_true, T, dt);
      p.v_ob[r] = tr.slow;
    }
  });
  return p;
}

ObjectiveValue objective(const EstimationProblem& p, double d) {
  require(d >= p.d_lo && d <= p.d_hi, ErrorCode::invalid_argument,
          "objective: d outside the admissible range");
  require(p.n_mc >= 1 && static_cast<int>(p.v_ob.size()) == p.n_mc, ErrorCode::invalid_argument,
          "objective: problem has no observations");
  std::vector<double> vals(p.n_mc);
  parallel_for(p.n_mc, p.n_workers, [&](int r) {
    const Trajectory tr = reduced_run(p, r, d);
    vals[r] = gap_integral(p.v_ob[r], tr.slow, p.dt);
  });
  ObjectiveValue out;
  for (double v : vals) out.mean += v;
  out.mean /= p.n_mc;
  if (p.n_mc > 1) {
    double s2 = 0.0;
    for (double v : vals) s2 += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(s2 / (p.n_mc - 1) / p.n_mc);
  }
  return out;
}

EstimationResult estimate(const EstimationProblem& p, int grid_n, int refine_iters) {
  require(grid_n >= 5, ErrorCode::invalid_argument, "estimate: grid_n must be at least 5");
  require(refine_iters >= 0, ErrorCode::invalid_argument, "estimate: refine_iters negative");

  EstimationResult res;
  res.curve_d.resize(grid_n);
  res.curve_F.resize(grid_n);
  res.curve_se.resize(grid_n);

  auto eval = [&](double d) {
    const ObjectiveValue v = objective(p, d);
    ++res.objective_evals;
    if (!std::isfinite(v.mean)) {
      std::ostringstream msg;
      msg << "estimate: objective is not finite at d = " << d;
      throw Error(ErrorCode::no_convergence, msg.str());
    }
    return v;
  };

  int best = 0;
  for (int i = 0; i < grid_n; ++i) {
    res.curve_d(i) = p.d_lo + (p.d_hi - p.d_lo) * i / (grid_n - 1);
    const ObjectiveValue v = eval(res.curve_d(i));
    res.curve_F(i) = v.mean;
    res.curve_se(i) = v.std_error;
    if (res.curve_F(i) < res.curve_F(best)) best = i;
  }

  // Golden-section refinement on the bracketing cells around the grid
  // minimum; assumes unimodality on that bracket.
  double a = res.curve_d(std::max(0, best - 1));
  double b = res.curve_d(std::min(grid_n - 1, best + 1));
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = eval(x1).mean;
  double f2 = eval(x2).mean;
  for (int it = 0; it < refine_iters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval(x1).mean;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval(x2).mean;
    }
  }
  res.d_hat = f1 <= f2 ? x1 : x2;
  res.F_min = std::min(f1, f2);
  if (res.curve_F(best) < res.F_min) {
    res.d_hat = res.curve_d(best);
    res.F_min = res.curve_F(best);
  }
  res.error_components = error_bound_report(p, res);
  return res;
}

ErrorBoundReport error_bound_report(const EstimationProblem& p, const EstimationResult& result) {
  ErrorBoundReport rep;
  const double d_hat = result.d_hat;
  const double C = 1.0;  // semigroup constant of the truncated diagonal basis
  const double Lf = p.m.lip_f;
  const double Lg = p.m.lip_g;
  const double lam1 = p.m.op.lambda1();
  require(lam1 > C * Lf, ErrorCode::hypothesis_violation,
          "error_bound_report: lambda_1 must exceed C L_f");

  const double h = 1e-5 * std::max(1.0, std::abs(d_hat));
  const int md = p.m.slow_dim();

  std::vector<double> fobj(p.n_mc), u0gap(p.n_mc);
  std::vector<std::array<double, 3>> gvals(p.n_mc);
  parallel_for(p.n_mc, p.n_workers, [&](int r) {
    const Trajectory tr = reduced_run(p, r, d_hat);
    fobj[r] = gap_integral(p.v_ob[r], tr.slow, p.dt);
    u0gap[r] = (p.u0[r] - p.eta[r].at(0.0) - p.H(0.0, p.v0)).norm();

    // G(t*) = | int_0^{t*} e^{-Jt} grad_d g dt |, gradient by central difference.
    const int ixi = p.xi[r].index_of(0.0);
    const int ieta = p.eta[r].index_of(0.0);
    const int n = tr.steps();
    const std::array<int, 3> stars = {n / 4, n / 2, (3 * n) / 4};
    const Eigen::MatrixXd back = slow_step_data(-p.m.J, p.dt).expJdt;  // e^{-J dt}
    Eigen::MatrixXd expmJ = Eigen::MatrixXd::Identity(md, md);
    Eigen::MatrixXd integrand(stars[2] + 1, md);
    for (int i = 0; i <= stars[2]; ++i) {
      const Eigen::VectorXd u = p.H(tr.times(i), tr.slow_at(i)) + p.eta[r].at_index(ieta + i);
      const Eigen::VectorXd v = tr.slow_at(i) + p.xi[r].at_index(ixi + i);
      const Eigen::VectorXd grad = (p.m.g(u, v, d_hat + h) - p.m.g(u, v, d_hat - h)) / (2.0 * h);
      integrand.row(i) = (expmJ * grad).transpose();
      expmJ = back * expmJ;
    }
    for (int s = 0; s < 3; ++s) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(md);
      for (int i = 0; i <= stars[s]; ++i) {
        const double w = (i == 0 || i == stars[s]) ? 0.5 : 1.0;
        acc += w * integrand.row(i).transpose();
      }
      gvals[r][s] = acc.norm() * p.dt;
    }
  });

  double Fm = 0.0, Ug = 0.0;
  std::array<double, 3> G = {0.0, 0.0, 0.0};
  for (int r = 0; r < p.n_mc; ++r) {
    Fm += fobj[r];
    Ug += u0gap[r];
    for (int s = 0; s < 3; ++s) G[s] += gvals[r][s];
  }
  Fm /= p.n_mc;
  Ug /= p.n_mc;
  for (auto& g : G) g /= p.n_mc;

  rep.G_quarter = G[0];
  rep.G_half = G[1];
  rep.G_three_quarter = G[2];
  rep.eps_term = C * Lg * Ug * p.m.eps / (lam1 - C * Lf);
  const double root_tf = std::sqrt(std::max(0.0, p.T * Fm));
  rep.fast_term = C * Lf * Lg / (lam1 - C * Lf) * root_tf;
  rep.obs_term = Lg * root_tf;
  rep.mvt_term = std::sqrt(std::max(0.0, Fm)) / p.T;
  rep.informative = rep.G_half > 1e-12;
  rep.bound = rep.informative
                  ? (rep.eps_term + rep.fast_term + rep.obs_term + rep.mvt_term) / rep.G_half
                  : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace fss
