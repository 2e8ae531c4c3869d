#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "fss/config.hpp"
#include "fss/errors.hpp"

using namespace fss;

namespace {

std::string write_temp(const std::string& body) {
  static int counter = 0;
  std::string path = "test_config_tmp_" + std::to_string(counter++) + ".ini";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("defaults survive an empty file") {
  const std::string path = write_temp("");
  const RunConfig cfg = load_config(path);
  CHECK(cfg.model_name == "example2");
  CHECK(cfg.alpha == 1.2);
  CHECK(cfg.eps == 0.01);
  CHECK(cfg.n_modes == 16);
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.seed == 20250826);
  CHECK(cfg.experiment == "check");
  CHECK(cfg.v0(0) == 2.0);
  CHECK(cfg.projection == "integral");
  CHECK(cfg.out_dir == "out");
  std::remove(path.c_str());
}

TEST_CASE("sections and comments parse") {
  const std::string path = write_temp(
      "# comment\n"
      "[model]\n"
      "alpha = 1.5\n"
      "n_modes = 8\n"
      "\n"
      "[numerics]\n"
      "dt = 0.002\n"
      "seed = 42\n"
      "[experiment]\n"
      "name = tracking\n"
      "v0 = 1.0, -0.5\n"
      "[output]\n"
      "dir = results\n"
      "dump_paths = true\n");
  const RunConfig cfg = load_config(path);
  CHECK(cfg.alpha == 1.5);
  CHECK(cfg.n_modes == 8);
  CHECK(cfg.dt == 0.002);
  CHECK(cfg.seed == 42);
  CHECK(cfg.experiment == "tracking");
  CHECK(cfg.v0.size() == 2);
  CHECK(cfg.v0(1) == -0.5);
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.dump_paths);
  std::remove(path.c_str());
}

TEST_CASE("matrix values parse rows and columns") {
  RunConfig cfg;
  apply_override(cfg, "model.j", "-1.0, 0.5; 0.0, -2.0");
  CHECK(cfg.J.rows() == 2);
  CHECK(cfg.J(0, 1) == 0.5);
  CHECK(cfg.J(1, 1) == -2.0);
  CHECK_THROWS_AS(apply_override(cfg, "model.j", "-1.0, 0.5; 0.0"), Error);
}

TEST_CASE("unknown keys and malformed values are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(apply_override(cfg, "model.omega", "3"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "numerics.dt", "fast"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "numerics.dt", "0.1x"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "numerics.max_iter", "2.5"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "dt", "0.1"), Error);  // missing section

  const std::string bad_section = write_temp("[solver]\ntol = 1\n");
  CHECK_THROWS_AS(load_config(bad_section), Error);
  std::remove(bad_section.c_str());

  const std::string bad_line = write_temp("[model]\nalpha 1.2\n");
  CHECK_THROWS_AS(load_config(bad_line), Error);
  std::remove(bad_line.c_str());

  CHECK_THROWS_AS(load_config("no_such_file_here.ini"), Error);
}

TEST_CASE("validation catches out-of-range settings") {
  RunConfig cfg;
  validate_config(cfg);  // defaults are valid

  RunConfig bad = cfg;
  bad.alpha = 2.0;
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = cfg;
  bad.eps = 0.0;
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = cfg;
  bad.experiment = "frobnicate";
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = cfg;
  bad.model_name = "example9";
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = cfg;
  bad.d_lo = 2.0;
  bad.d_hi = 0.2;
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = cfg;
  bad.grid_n = 3;
  CHECK_THROWS_AS(validate_config(bad), Error);
  bad = cfg;
  bad.projection = "orthogonal";
  CHECK_THROWS_AS(validate_config(bad), Error);
}

TEST_CASE("dump and reload round-trips exactly") {
  RunConfig cfg;
  apply_override(cfg, "model.alpha", "1.3");
  apply_override(cfg, "model.eps", "0.037");
  apply_override(cfg, "numerics.dt", "0.00025");
  apply_override(cfg, "numerics.tol", "3.14159e-9");
  apply_override(cfg, "experiment.name", "estimate");
  apply_override(cfg, "experiment.v0", "0.1, 0.2, 0.3");
  apply_override(cfg, "model.j", "-1, 0; 0, -3");
  apply_override(cfg, "model.name", "custom");

  const std::string path = write_temp(dump_config(cfg));
  const RunConfig back = load_config(path);
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.eps == cfg.eps);
  CHECK(back.dt == cfg.dt);
  CHECK(back.tol == cfg.tol);
  CHECK(back.experiment == cfg.experiment);
  CHECK(back.v0 == cfg.v0);
  CHECK(back.J == cfg.J);
  CHECK(dump_config(back) == dump_config(cfg));
  std::remove(path.c_str());
}

TEST_CASE("build_model reflects the configuration") {
  RunConfig cfg;
  const ModelSpec ex2 = build_model(cfg);
  CHECK(ex2.n_modes() == 16);
  CHECK(ex2.eps == 0.01);
  CHECK(ex2.param_d == 1.0);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  CHECK(ex2.f(u, Eigen::VectorXd::Zero(1)).norm() == 0.0);

  apply_override(cfg, "model.name", "custom");
  apply_override(cfg, "model.j", "-2, 0; 0, -1");
  apply_override(cfg, "model.gamma2", "1.0");
  apply_override(cfg, "experiment.v0", "1, 1");
  const ModelSpec lin = build_model(cfg);
  CHECK(lin.slow_dim() == 2);
  CHECK(lin.lip_f == 0.0);
  CHECK(lin.g(u, Eigen::VectorXd::Ones(2), 1.0).norm() == 0.0);
}
