#include "fss/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "fss/errors.hpp"
#include "fss/estimation.hpp"
#include "fss/manifold.hpp"
#include "fss/model.hpp"
#include "fss/noise.hpp"
#include "fss/simulate.hpp"
#include "fss/tracking.hpp"

namespace fss {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class OutDir {
 public:
  OutDir(const RunConfig& cfg) : dir_(cfg.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::io_failure, "cannot create output dir '" + dir_ + "'");
  }

  std::ofstream open(const std::string& name, const std::string& columns) {
    std::ofstream f(dir_ + "/" + name, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_failure, "cannot write '" + dir_ + "/" + name + "'");
    manifest_ << name << ": " << columns << "\n";
    if (!columns.empty()) f << columns << "\n";
    return f;
  }

  void finish(const std::string& summary, const std::string& log) {
    write_plain("summary.txt", summary);
    write_plain("log.txt", log);
    write_plain("manifest.txt", manifest_.str());
  }

  void write_plain(const std::string& name, const std::string& body) {
    std::ofstream f(dir_ + "/" + name, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_failure, "cannot write '" + dir_ + "/" + name + "'");
    f << body;
  }

 private:
  std::string dir_;
  std::ostringstream manifest_;
};

void append_report(std::ostringstream& sum, std::ostringstream& log, const ModelSpec& m,
                   const HypothesisReport& rep) {
  sum << "check.gap_ok=" << (rep.gap_ok ? "true" : "false") << "\n";
  sum << "check.mu=" << fmt(rep.mu) << "\n";
  sum << "check.lip_bound_rhs=" << fmt(rep.lip_bound_rhs) << "\n";
  sum << "check.k_declared=" << fmt(rep.k_declared) << "\n";
  sum << "check.lambda1=" << fmt(m.op.lambda1()) << "\n";
  sum << "check.j_decay_ok=" << (rep.j_decay_ok ? "true" : "false") << "\n";
  log << "structural check\n";
  log << "  lambda_1            = " << fmt(m.op.lambda1()) << "\n";
  log << "  mu                  = " << fmt(rep.mu) << "\n";
  log << "  spectral gap bound  = " << fmt(rep.lip_bound_rhs) << "\n";
  log << "  declared K          = " << fmt(rep.k_declared) << "\n";
  log << "  gap condition       = " << (rep.gap_ok ? "satisfied" : "VIOLATED") << "\n";
  log << "  e^{Jt} decay        = " << (rep.j_decay_ok ? "satisfied" : "VIOLATED") << "\n";
  log << "  sampled lip(f)      = " << fmt(rep.sampled_lip_f) << "\n";
  log << "  sampled lip(g)      = " << fmt(rep.sampled_lip_g) << "\n";
  for (const auto& w : rep.warnings) log << "  warning: " << w << "\n";
}

void write_trajectory(OutDir& out, const std::string& name, const Trajectory& tr) {
  std::string cols = "time";
  for (int k = 0; k < tr.fast.cols(); ++k) cols += ",u_" + std::to_string(k + 1);
  for (int k = 0; k < tr.slow.cols(); ++k) cols += ",v_" + std::to_string(k + 1);
  std::ofstream f = out.open(name, cols);
  for (int i = 0; i <= tr.steps(); ++i) {
    f << fmt(tr.times(i));
    for (int k = 0; k < tr.fast.cols(); ++k) f << "," << fmt(tr.fast(i, k));
    for (int k = 0; k < tr.slow.cols(); ++k) f << "," << fmt(tr.slow(i, k));
    f << "\n";
  }
}

struct NoiseBundle {
  WienerPath w_fast, w_slow;
  OUPath eta, xi;
};

NoiseBundle make_noise(const ModelSpec& m, double t0, double t1, double dt, std::uint64_t seed) {
  NoiseBundle nb;
  nb.w_fast = generate_wiener(t0, t1, dt, m.n_modes(), derive_seed(seed, 1));
  nb.w_slow = generate_wiener(t0, t1, dt, m.slow_dim(), derive_seed(seed, 2));
  nb.eta = ou_fast_stationary(m.op, m.eps, m.sigma1, nb.w_fast);
  nb.xi = ou_slow_stationary(m.J, m.sigma2, nb.w_slow);
  return nb;
}

LPConfig lp_config(const RunConfig& cfg) {
  LPConfig lp;
  lp.t_minus = cfg.t_minus;
  lp.dt = cfg.dt;
  lp.tol = cfg.tol;
  lp.max_iter = cfg.max_iter;
  return lp;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg) {
  validate_config(cfg);
  const ModelSpec m = build_model(cfg);
  const HypothesisReport rep = hypothesis_check(m);
  const LPConfig lp = lp_config(cfg);

  OutDir out(cfg);
  std::ostringstream sum, log;
  bool pass = true;

  sum << "experiment=" << cfg.experiment << "\n";
  append_report(sum, log, m, rep);
  if (cfg.experiment != "check" && !rep.gap_ok)
    throw Error(ErrorCode::hypothesis_violation,
                "model: spectral gap condition fails; only 'check' may run");

  const double pad_back =
      std::ceil((effective_t_minus(m, lp) + 1.0) / cfg.dt) * cfg.dt;
  const double t_end = cfg.t_total + 1.0;

  if (cfg.experiment == "check") {
    pass = rep.gap_ok && rep.j_decay_ok;
  } else if (cfg.experiment == "simulate") {
    const NoiseBundle nb = make_noise(m, -pad_back, t_end, cfg.dt, cfg.seed);
    const Eigen::VectorXd h0 = h0_leading_order(m, cfg.v0);
    const Eigen::VectorXd u0 = nb.eta.at(0.0) + h0;
    const Trajectory full = simulate_full(m, nb.w_fast, nb.w_slow, u0, cfg.v0, cfg.t_total, cfg.dt);
    const Trajectory rnd =
        simulate_random(m, nb.eta, nb.xi, u0 - nb.eta.at(0.0), cfg.v0 - nb.xi.at(0.0),
                        cfg.t_total, cfg.dt);
    write_trajectory(out, "trajectory_full.csv", full);
    write_trajectory(out, "trajectory_random.csv", rnd);
    // Pathwise consistency of the random transformation.
    double max_dev = 0.0;
    const int ie = nb.eta.index_of(0.0), ix = nb.xi.index_of(0.0);
    for (int i = 0; i <= full.steps(); ++i) {
      const double du = (full.fast_at(i) - rnd.fast_at(i) - nb.eta.at_index(ie + i)).norm();
      const double dv = (full.slow_at(i) - rnd.slow_at(i) - nb.xi.at_index(ix + i)).norm();
      max_dev = std::max(max_dev, du + dv);
    }
    sum << "simulate.steps=" << full.steps() << "\n";
    sum << "simulate.transform_deviation=" << fmt(max_dev) << "\n";
    sum << "simulate.final_fast_norm=" << fmt(full.fast_at(full.steps()).norm()) << "\n";
    sum << "simulate.final_slow_norm=" << fmt(full.slow_at(full.steps()).norm()) << "\n";
    pass = max_dev <= 1e-6;
    for (const auto& w : full.warnings) log << "  warning: " << w << "\n";
    if (cfg.dump_paths) {
      std::ofstream f = out.open("wiener_fast.csv", "time,mode,increment");
      for (int i = 0; i < nb.w_fast.steps(); ++i)
        for (int k = 0; k < nb.w_fast.dims(); ++k)
          f << fmt(nb.w_fast.t0 + i * nb.w_fast.dt) << "," << (k + 1) << ","
            << fmt(nb.w_fast.increments(i, k)) << "\n";
    }
  } else if (cfg.experiment == "manifold") {
    const NoiseBundle nb = make_noise(m, -pad_back, t_end, cfg.dt, cfg.seed);
    std::string cols;
    for (int j = 0; j < m.slow_dim(); ++j) cols += (j ? "," : "") + ("v0_" + std::to_string(j + 1));
    for (int k = 0; k < m.n_modes(); ++k) cols += ",h_" + std::to_string(k + 1);
    const int nx = 101;
    for (int j = 0; j < nx; ++j) cols += ",u_x" + std::to_string(j);
    std::ofstream f = out.open("manifold_grid.csv", cols);
    int rows = 0;
    double worst_contraction = 0.0;
    std::vector<Eigen::VectorXd> anchors;
    for (double v = cfg.v0_grid_lo; v <= cfg.v0_grid_hi + 1e-12; v += cfg.v0_grid_step) {
      Eigen::VectorXd V0 = Eigen::VectorXd::Constant(m.slow_dim(), v);
      const ManifoldSolution sol = lp_solve(m, nb.eta, nb.xi, V0, lp);
      anchors.push_back(V0);
      worst_contraction = std::max(worst_contraction, sol.contraction_estimate);
      for (int j = 0; j < m.slow_dim(); ++j) f << (j ? "," : "") << fmt(V0(j));
      for (int k = 0; k < m.n_modes(); ++k) f << "," << fmt(sol.H_value(k));
      for (int j = 0; j < nx; ++j) {
        const double x = -1.0 + 2.0 * j / (nx - 1);
        double u = 0.0;
        for (int k = 0; k < m.n_modes(); ++k) u += sol.H_value(k) * basis_function(k + 1, x);
        f << "," << fmt(u);
      }
      f << "\n";
      ++rows;
    }
    const LipschitzReport lrep = lipschitz_estimate(m, nb.eta, nb.xi, anchors, lp);
    sum << "manifold.rows=" << rows << "\n";
    sum << "manifold.contraction_max=" << fmt(worst_contraction) << "\n";
    sum << "manifold.lipschitz_measured=" << fmt(lrep.measured_lip) << "\n";
    sum << "manifold.lipschitz_bound=" << fmt(lrep.graph_bound) << "\n";
    pass = lrep.pass;
  } else if (cfg.experiment == "tracking") {
    const NoiseBundle nb = make_noise(m, -pad_back, t_end, cfg.dt, cfg.seed);
    const Eigen::VectorXd h = lp_solve(m, nb.eta, nb.xi, cfg.v0, lp).H_value;
    Eigen::VectorXd U0 = h;
    for (int k = 0; k < m.n_modes(); ++k) U0(k) += cfg.tracking_offset / (k + 1.0);
    const ProjectionMode mode =
        cfg.projection == "fiber" ? ProjectionMode::fiber : ProjectionMode::integral;
    const TrackingReport tr =
        tracking_verify(m, nb.eta, nb.xi, U0, cfg.v0, cfg.t_total, cfg.dt, lp, mode);
    std::ofstream f = out.open("tracking.csv", "time,gap,envelope");
    const double gap0 = tr.gaps(0);
    for (int i = 0; i < tr.times.size(); ++i)
      f << fmt(tr.times(i)) << "," << fmt(tr.gaps(i)) << ","
        << fmt(tr.bound_prefactor * std::exp(-tr.bound_rate * tr.times(i)) * gap0) << "\n";
    sum << "tracking.fitted_rate=" << fmt(tr.fitted_rate) << "\n";
    sum << "tracking.bound_rate=" << fmt(tr.bound_rate) << "\n";
    sum << "tracking.prefactor=" << fmt(tr.bound_prefactor) << "\n";
    sum << "tracking.projection=" << tr.projection << "\n";
    sum << "tracking.pass=" << (tr.pass ? "true" : "false") << "\n";
    pass = tr.pass && tr.fitted_rate >= 0.9 * tr.bound_rate;
  } else {  // estimate
    const ObsSource src =
        cfg.obs_source == "reduced" ? ObsSource::reduced_system : ObsSource::full_system;
    const EstimationProblem prob =
        make_synthetic_problem(m, cfg.a_true, cfg.d_lo, cfg.d_hi, cfg.v0, cfg.t_total, cfg.dt,
                               cfg.n_mc, cfg.seed, src, cfg.n_workers);
    const EstimationResult res = estimate(prob, cfg.grid_n, cfg.refine_iters);
    std::ofstream f = out.open("objective_curve.csv", "d,F,stderr");
    for (int i = 0; i < res.curve_d.size(); ++i)
      f << fmt(res.curve_d(i)) << "," << fmt(res.curve_F(i)) << "," << fmt(res.curve_se(i))
        << "\n";
    const ErrorBoundReport& eb = res.error_components;
    sum << "estimate.d_hat=" << fmt(res.d_hat) << "\n";
    sum << "estimate.d_true=" << fmt(cfg.a_true) << "\n";
    sum << "estimate.F_min=" << fmt(res.F_min) << "\n";
    sum << "estimate.objective_evals=" << res.objective_evals << "\n";
    sum << "estimate.bound.G_half=" << fmt(eb.G_half) << "\n";
    sum << "estimate.bound.G_quarter=" << fmt(eb.G_quarter) << "\n";
    sum << "estimate.bound.G_three_quarter=" << fmt(eb.G_three_quarter) << "\n";
    sum << "estimate.bound.eps_term=" << fmt(eb.eps_term) << "\n";
    sum << "estimate.bound.fast_term=" << fmt(eb.fast_term) << "\n";
    sum << "estimate.bound.obs_term=" << fmt(eb.obs_term) << "\n";
    sum << "estimate.bound.mvt_term=" << fmt(eb.mvt_term) << "\n";
    sum << "estimate.bound.total=" << fmt(eb.bound) << "\n";
    sum << "estimate.bound.informative=" << (eb.informative ? "true" : "false") << "\n";
    pass = std::isfinite(res.F_min) && res.d_hat >= cfg.d_lo && res.d_hat <= cfg.d_hi;
  }

  sum << "pass=" << (pass ? "true" : "false") << "\n";
  sum << "seed=" << cfg.seed << "\n";
  // Embed the fully resolved configuration so the run can be reproduced
  // from the summary alone.
  {
    std::istringstream cfgs(dump_config(cfg));
    std::string line, section;
    while (std::getline(cfgs, line)) {
      if (line.empty()) continue;
      if (line.front() == '[') {
        section = line.substr(1, line.size() - 2);
        continue;
      }
      const size_t eq = line.find('=');
      sum << "config." << section << "." << line.substr(0, eq - 1) << "="
          << line.substr(eq + 2) << "\n";
    }
  }

  out.write_plain("resolved.ini", dump_config(cfg));
  out.finish(sum.str(), log.str());

  RunOutcome o;
  o.exit_code = pass ? 0 : 1;
  o.summary = sum.str();
  return o;
}

}  // namespace fss
