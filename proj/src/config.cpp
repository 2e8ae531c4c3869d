#include "fss/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "fss/errors.hpp"

namespace fss {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_real(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == v.size() && !v.empty(), ErrorCode::invalid_argument,
          "config: key '" + key + "' has a malformed number '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == v.size() && !v.empty(), ErrorCode::invalid_argument,
          "config: key '" + key + "' has a malformed integer '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  require(pos == v.size() && !v.empty(), ErrorCode::invalid_argument,
          "config: key '" + key + "' has a malformed unsigned integer '" + v + "'");
  return static_cast<std::uint64_t>(out);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::invalid_argument,
              "config: key '" + key + "' expects true/false, got '" + v + "'");
}

// Vector: comma-separated reals. Matrix: semicolon-separated rows.
Eigen::VectorXd parse_vector(const std::string& key, const std::string& v) {
  std::vector<double> vals;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(parse_real(key, trim(tok)));
  require(!vals.empty(), ErrorCode::invalid_argument, "config: key '" + key + "' is empty");
  Eigen::VectorXd out(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) out(static_cast<int>(i)) = vals[i];
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& key, const std::string& v) {
  std::vector<Eigen::VectorXd> rows;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ';')) rows.push_back(parse_vector(key, trim(tok)));
  const int nc = static_cast<int>(rows[0].size());
  Eigen::MatrixXd out(static_cast<int>(rows.size()), nc);
  for (size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == nc, ErrorCode::invalid_argument,
            "config: key '" + key + "' has ragged matrix rows");
    out.row(static_cast<int>(i)) = rows[i].transpose();
  }
  return out;
}

std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_vector(const Eigen::VectorXd& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_real(v(i));
  }
  return s;
}

std::string fmt_matrix(const Eigen::MatrixXd& m) {
  std::string s;
  for (int i = 0; i < m.rows(); ++i) {
    if (i) s += ";";
    s += fmt_vector(m.row(i).transpose());
  }
  return s;
}

}  // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "model.name") c.model_name = v;
  else if (key == "model.alpha") c.alpha = parse_real(key, v);
  else if (key == "model.eps") c.eps = parse_real(key, v);
  else if (key == "model.sigma1") c.sigma1 = parse_real(key, v);
  else if (key == "model.sigma2") c.sigma2 = parse_real(key, v);
  else if (key == "model.n_modes") c.n_modes = static_cast<int>(parse_int(key, v));
  else if (key == "model.gamma2") c.gamma2 = parse_real(key, v);
  else if (key == "model.a") c.a = parse_real(key, v);
  else if (key == "model.j") c.J = parse_matrix(key, v);
  else if (key == "numerics.dt") c.dt = parse_real(key, v);
  else if (key == "numerics.t_total") c.t_total = parse_real(key, v);
  else if (key == "numerics.t_minus") c.t_minus = parse_real(key, v);
  else if (key == "numerics.tol") c.tol = parse_real(key, v);
  else if (key == "numerics.max_iter") c.max_iter = static_cast<int>(parse_int(key, v));
  else if (key == "numerics.n_mc") c.n_mc = static_cast<int>(parse_int(key, v));
  else if (key == "numerics.seed") c.seed = parse_u64(key, v);
  else if (key == "numerics.n_workers") c.n_workers = static_cast<int>(parse_int(key, v));
  else if (key == "experiment.name") c.experiment = v;
  else if (key == "experiment.v0") c.v0 = parse_vector(key, v);
  else if (key == "experiment.v0_grid_lo") c.v0_grid_lo = parse_real(key, v);
  else if (key == "experiment.v0_grid_hi") c.v0_grid_hi = parse_real(key, v);
  else if (key == "experiment.v0_grid_step") c.v0_grid_step = parse_real(key, v);
  else if (key == "experiment.d_lo") c.d_lo = parse_real(key, v);
  else if (key == "experiment.d_hi") c.d_hi = parse_real(key, v);
  else if (key == "experiment.a_true") c.a_true = parse_real(key, v);
  else if (key == "experiment.grid_n") c.grid_n = static_cast<int>(parse_int(key, v));
  else if (key == "experiment.refine_iters") c.refine_iters = static_cast<int>(parse_int(key, v));
  else if (key == "experiment.projection") c.projection = v;
  else if (key == "experiment.obs_source") c.obs_source = v;
  else if (key == "experiment.tracking_offset") c.tracking_offset = parse_real(key, v);
  else if (key == "output.dir") c.out_dir = v;
  else if (key == "output.dump_paths") c.dump_paths = parse_bool(key, v);
  else throw Error(ErrorCode::invalid_argument, "config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "config: cannot read '" + path + "'");
  RunConfig c;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      require(section == "model" || section == "numerics" || section == "experiment" ||
                  section == "output",
              ErrorCode::invalid_argument,
              "config: unknown section '" + section + "' at line " + std::to_string(lineno));
      continue;
    }
    const size_t eq = s.find('=');
    require(eq != std::string::npos, ErrorCode::invalid_argument,
            "config: expected key=value at line " + std::to_string(lineno));
    require(!section.empty(), ErrorCode::invalid_argument,
            "config: key outside any section at line " + std::to_string(lineno));
    apply_override(c, section + "." + trim(s.substr(0, eq)), s.substr(eq + 1));
  }
  return c;
}

void validate_config(const RunConfig& c) {
  require(c.model_name == "example2" || c.model_name == "custom", ErrorCode::invalid_argument,
          "config: model.name must be example2 or custom");
  require(c.alpha > 1.0 && c.alpha < 2.0, ErrorCode::invalid_argument,
          "config: model.alpha must lie in (1,2)");
  require(c.eps > 0.0, ErrorCode::invalid_argument, "config: model.eps must be positive");
  require(c.sigma1 >= 0.0 && c.sigma2 >= 0.0, ErrorCode::invalid_argument,
          "config: model.sigma1 and model.sigma2 must be nonnegative");
  require(c.n_modes >= 1, ErrorCode::invalid_argument, "config: model.n_modes must be >= 1");
  require(c.gamma2 > 0.0, ErrorCode::invalid_argument, "config: model.gamma2 must be positive");
  require(c.J.rows() == c.J.cols() && c.J.rows() >= 1, ErrorCode::invalid_argument,
          "config: model.j must be a square matrix");
  require(c.dt > 0.0 && c.t_total > 0.0 && c.t_minus > 0.0, ErrorCode::invalid_argument,
          "config: numerics.dt, t_total, t_minus must be positive");
  require(c.tol > 0.0 && c.max_iter >= 1 && c.n_mc >= 1, ErrorCode::invalid_argument,
          "config: numerics.tol, max_iter, n_mc must be positive");
  require(c.n_workers >= 0, ErrorCode::invalid_argument,
          "config: numerics.n_workers must be >= 0");
  require(c.experiment == "check" || c.experiment == "simulate" || c.experiment == "manifold" ||
              c.experiment == "tracking" || c.experiment == "estimate",
          ErrorCode::invalid_argument,
          "config: experiment.name must be one of check|simulate|manifold|tracking|estimate");
  require(c.v0.size() == c.J.rows(), ErrorCode::invalid_argument,
          "config: experiment.v0 length must match model.j dimension");
  require(c.v0_grid_step > 0.0 && c.v0_grid_lo <= c.v0_grid_hi, ErrorCode::invalid_argument,
          "config: experiment v0 grid is empty");
  require(c.d_lo < c.d_hi, ErrorCode::invalid_argument,
          "config: experiment.d_lo must be below experiment.d_hi");
  require(c.grid_n >= 5, ErrorCode::invalid_argument, "config: experiment.grid_n must be >= 5");
  require(c.refine_iters >= 0, ErrorCode::invalid_argument,
          "config: experiment.refine_iters must be >= 0");
  require(c.projection == "integral" || c.projection == "fiber", ErrorCode::invalid_argument,
          "config: experiment.projection must be integral or fiber");
  require(c.obs_source == "full" || c.obs_source == "reduced", ErrorCode::invalid_argument,
          "config: experiment.obs_source must be full or reduced");
  require(!c.out_dir.empty(), ErrorCode::invalid_argument, "config: output.dir is empty");
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[model]\n";
  o << "name = " << c.model_name << "\n";
  o << "alpha = " << fmt_real(c.alpha) << "\n";
  o << "eps = " << fmt_real(c.eps) << "\n";
  o << "sigma1 = " << fmt_real(c.sigma1) << "\n";
  o << "sigma2 = " << fmt_real(c.sigma2) << "\n";
  o << "n_modes = " << c.n_modes << "\n";
  o << "gamma2 = " << fmt_real(c.gamma2) << "\n";
  o << "a = " << fmt_real(c.a) << "\n";
  o << "j = " << fmt_matrix(c.J) << "\n";
  o << "\n[numerics]\n";
  o << "dt = " << fmt_real(c.dt) << "\n";
  o << "t_total = " << fmt_real(c.t_total) << "\n";
  o << "t_minus = " << fmt_real(c.t_minus) << "\n";
  o << "tol = " << fmt_real(c.tol) << "\n";
  o << "max_iter = " << c.max_iter << "\n";
  o << "n_mc = " << c.n_mc << "\n";
  o << "seed = " << c.seed << "\n";
  o << "n_workers = " << c.n_workers << "\n";
  o << "\n[experiment]\n";
  o << "name = " << c.experiment << "\n";
  o << "v0 = " << fmt_vector(c.v0) << "\n";
  o << "v0_grid_lo = " << fmt_real(c.v0_grid_lo) << "\n";
  o << "v0_grid_hi = " << fmt_real(c.v0_grid_hi) << "\n";
  o << "v0_grid_step = " << fmt_real(c.v0_grid_step) << "\n";
  o << "d_lo = " << fmt_real(c.d_lo) << "\n";
  o << "d_hi = " << fmt_real(c.d_hi) << "\n";
  o << "a_true = " << fmt_real(c.a_true) << "\n";
  o << "grid_n = " << c.grid_n << "\n";
  o << "refine_iters = " << c.refine_iters << "\n";
  o << "projection = " << c.projection << "\n";
  o << "obs_source = " << c.obs_source << "\n";
  o << "tracking_offset = " << fmt_real(c.tracking_offset) << "\n";
  o << "\n[output]\n";
  o << "dir = " << c.out_dir << "\n";
  o << "dump_paths = " << (c.dump_paths ? "true" : "false") << "\n";
  return o.str();
}

ModelSpec build_model(const RunConfig& c) {
  validate_config(c);
  if (c.model_name == "example2") {
    require(c.J.rows() == 1, ErrorCode::invalid_argument,
            "config: example2 uses a one-dimensional slow variable");
    ModelSpec m = make_example2(c.alpha, c.eps, c.sigma1, c.sigma2, c.a, c.n_modes);
    m.J = c.J;
    m.gamma2 = c.gamma2;
    return m;
  }
  return make_linear_model(c.alpha, c.eps, c.sigma1, c.sigma2, c.J, c.gamma2, c.n_modes);
}

}  // namespace fss
