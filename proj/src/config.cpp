#include "lure_pcac/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace lure_pcac {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "': " + why);
}

std::vector<std::string> split_top_level(const std::string& body, const std::string& key) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : body) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (depth < 0) bad_key(key, "unbalanced brackets");
    if (c == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (depth != 0) bad_key(key, "unbalanced brackets");
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(trim(cur));
  return parts;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    map[key] = value;
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be key=value: " + ov);
    const std::string key = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("override must be key=value: " + ov);
    map[key] = value;
  }
}

double parse_scalar(const std::string& text, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  bad_key(key, "expected a scalar, got '" + text + "'");
}

long parse_integer(const std::string& text, const std::string& key) {
  try {
    size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  bad_key(key, "expected an integer, got '" + text + "'");
}

bool parse_boolean(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  bad_key(key, "expected true/false, got '" + text + "'");
}

Vector parse_vector(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    bad_key(key, "expected a bracketed vector");
  const auto parts = split_top_level(t.substr(1, t.size() - 2), key);
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_scalar(parts[i], key);
  return v;
}

Matrix parse_matrix(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    bad_key(key, "expected a bracketed matrix");
  const auto rows = split_top_level(t.substr(1, t.size() - 2), key);
  if (rows.empty()) bad_key(key, "matrix has no rows");
  if (rows[0].empty() || rows[0].front() != '[') {
    // single bracketed list: 1 x n row
    const Vector v = parse_vector(t, key);
    return v.transpose();
  }
  std::vector<Vector> parsed;
  for (const std::string& r : rows) parsed.push_back(parse_vector(r, key));
  const Eigen::Index cols = parsed[0].size();
  Matrix M(static_cast<Eigen::Index>(parsed.size()), cols);
  for (size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].size() != cols) bad_key(key, "ragged matrix rows");
    M.row(static_cast<Eigen::Index>(i)) = parsed[i].transpose();
  }
  return M;
}

namespace {

// Shape-free matrix grammar; `rows`/`cols` supply the contextual dimensions,
// `p` the output-block size for `first_block`.
Matrix parse_shaped_matrix(const std::string& text, const std::string& key,
                           Eigen::Index rows, Eigen::Index cols, Eigen::Index p) {
  std::string t = trim(text);
  double scale = 1.0;
  const size_t star = t.find('*');
  if (star != std::string::npos && t.front() != '[') {
    scale = parse_scalar(trim(t.substr(star + 1)), key);
    t = trim(t.substr(0, star));
  }
  if (t == "eye") {
    require(rows == cols, "config key '" + key + "': eye needs a square target");
    return scale * Matrix::Identity(rows, cols);
  }
  if (t == "zeros") return Matrix::Zero(rows, cols);
  if (t == "first_block") {
    require(rows == cols, "config key '" + key + "': first_block needs a square target");
    Matrix M = Matrix::Zero(rows, cols);
    M.topLeftCorner(p, p) = scale * Matrix::Identity(p, p);
    return M;
  }
  if (t.front() == '[') {
    Matrix M = parse_matrix(t, key);
    if (M.rows() != rows || M.cols() != cols)
      bad_key(key, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    return M;
  }
  if (rows == 1 && cols == 1) return scale * parse_scalar(t, key) * Matrix::Ones(1, 1);
  bad_key(key, "unrecognized matrix value '" + text + "'");
}

Vector parse_shaped_vector(const std::string& text, const std::string& key, Eigen::Index size) {
  std::string t = trim(text);
  double scale = 1.0;
  const size_t star = t.find('*');
  if (star != std::string::npos && t.front() != '[') {
    scale = parse_scalar(trim(t.substr(star + 1)), key);
    t = trim(t.substr(0, star));
  }
  if (t == "ones") return scale * Vector::Ones(size);
  if (t == "zeros") return Vector::Zero(size);
  if (t.front() == '[') {
    Vector v = parse_vector(t, key);
    if (v.size() != size)
      bad_key(key, "expected a vector of length " + std::to_string(size));
    return v;
  }
  if (size == 1) return scale * parse_scalar(t, key) * Vector::Ones(1);
  bad_key(key, "unrecognized vector value '" + text + "'");
}

class KeyReader {
 public:
  explicit KeyReader(const ConfigMap& map) : map_(map) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return map_.count(key) > 0;
  }
  const std::string& raw(const std::string& key) {
    seen_.insert(key);
    auto it = map_.find(key);
    if (it == map_.end()) bad_key(key, "required key is missing");
    return it->second;
  }
  std::string raw_or(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    auto it = map_.find(key);
    return it == map_.end() ? fallback : it->second;
  }
  double scalar_or(const std::string& key, double fallback) {
    return has(key) ? parse_scalar(raw(key), key) : fallback;
  }
  long integer_or(const std::string& key, long fallback) {
    return has(key) ? parse_integer(raw(key), key) : fallback;
  }
  bool boolean_or(const std::string& key, bool fallback) {
    return has(key) ? parse_boolean(raw(key), key) : fallback;
  }

  void mark(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [key, value] : map_)
      if (!seen_.count(key))
        throw std::invalid_argument("unknown config key '" + key + "'");
  }

 private:
  const ConfigMap& map_;
  std::set<std::string> seen_;
};

ScalarNonlinearity build_channel(KeyReader& r, const std::string& prefix) {
  const std::string kind = r.raw_or(prefix + ".kind", "zero");
  if (kind == "zero") return ScalarNonlinearity::zero();
  if (kind == "tanh") return ScalarNonlinearity::tanh();
  if (kind == "affine_sine")
    return ScalarNonlinearity::affine_sine_fn(r.scalar_or(prefix + ".c1", 0.0),
                                              r.scalar_or(prefix + ".c2", 0.0));
  if (kind == "gaussian_plus_piecewise")
    return ScalarNonlinearity::gaussian_piecewise(r.scalar_or(prefix + ".s_lo", 1.0),
                                                  r.scalar_or(prefix + ".s_hi", 1.0));
  if (kind == "table") {
    const Matrix pts = parse_matrix(r.raw(prefix + ".points"), prefix + ".points");
    require(pts.cols() == 2, "config key '" + prefix + ".points': expected rows of [y, value]");
    std::vector<std::pair<double, double>> v;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) v.emplace_back(pts(i, 0), pts(i, 1));
    return ScalarNonlinearity::from_table(std::move(v));
  }
  bad_key(prefix + ".kind", "unknown nonlinearity kind '" + kind + "'");
}

}  // namespace

FullConfig build_config(const ConfigMap& map) {
  KeyReader r(map);
  FullConfig fc;

  const Matrix A = parse_matrix(r.raw("plant.A"), "plant.A");
  const Matrix B = parse_matrix(r.raw("plant.B"), "plant.B");
  const Matrix C = parse_matrix(r.raw("plant.C"), "plant.C");
  const Vector x0 = parse_shaped_vector(r.raw_or("plant.x0", "zeros"), "plant.x0", A.rows());
  fc.sim.plant = LurePlant(A, B, C, x0);
  const Eigen::Index p = fc.sim.plant.p(), m = fc.sim.plant.m();

  const std::string gkind = r.raw_or("gamma.kind", "zero");
  if (gkind == "diagonal") {
    require(m == p, "config key 'gamma.kind': diagonal nonlinearity needs m = p");
    std::vector<ScalarNonlinearity> channels;
    for (Eigen::Index i = 1; i <= m; ++i)
      channels.push_back(build_channel(r, "gamma.channel." + std::to_string(i)));
    fc.sim.gamma = Nonlinearity::diagonal(std::move(channels));
  } else {
    require(m == 1 && p == 1, "config key 'gamma.kind': scalar kinds need a SISO plant");
    fc.sim.gamma = Nonlinearity::diagonal({build_channel(r, "gamma")});
  }

  if (r.has("schedule.impulses")) {
    const Matrix rows = parse_matrix(r.raw("schedule.impulses"), "schedule.impulses");
    require(rows.cols() == 1 + m, "config key 'schedule.impulses': rows must be [k, v_1..v_m]");
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const long k = static_cast<long>(rows(i, 0));
      require(k >= 0, "config key 'schedule.impulses': steps must be nonnegative");
      fc.sim.schedule.impulses[k] = rows.row(i).tail(m).transpose();
    }
  }

  fc.sim.rls.nhat = parse_integer(r.raw("rls.nhat"), "rls.nhat");
  fc.sim.rls.p = p;
  fc.sim.rls.m = m;
  const Eigen::Index dim = fc.sim.rls.dim();
  fc.sim.rls.theta0 =
      parse_shaped_vector(r.raw_or("rls.theta0", "ones * 1e-10"), "rls.theta0", dim);
  fc.sim.rls.Psi0 =
      parse_shaped_matrix(r.raw_or("rls.psi0", "eye"), "rls.psi0", dim, dim, p);
  fc.sim.rls.tau_n = r.integer_or("rls.tau_n", 40);
  fc.sim.rls.tau_d = r.integer_or("rls.tau_d", 200);
  fc.sim.rls.eta = r.scalar_or("rls.eta", 0.1);
  fc.sim.rls.alpha = r.scalar_or("rls.alpha", 0.001);

  const Eigen::Index np = fc.sim.rls.nhat * p;
  fc.sim.bpre.horizon = r.integer_or("bpre.horizon", 20);
  fc.sim.bpre.R1 =
      parse_shaped_matrix(r.raw_or("bpre.R1", "first_block"), "bpre.R1", np, np, p);
  fc.sim.bpre.R2 = parse_shaped_matrix(r.raw_or("bpre.R2", "eye"), "bpre.R2", m, m, p);
  fc.sim.bpre.P_terminal = parse_shaped_matrix(r.raw_or("bpre.P_terminal", "first_block"),
                                               "bpre.P_terminal", np, np, p);

  fc.sim.limits.u_min = r.scalar_or("limits.u_min", -std::numeric_limits<double>::infinity());
  fc.sim.limits.u_max = r.scalar_or("limits.u_max", std::numeric_limits<double>::infinity());

  fc.sim.k_engage = r.integer_or("sim.k_engage", 100);
  fc.sim.k_final = r.integer_or("sim.k_final", 1000);
  fc.sim.identify_during_open_loop = r.boolean_or("sim.identify_during_open_loop", false);

  fc.sector.K1 = parse_shaped_matrix(r.raw_or("sector.K1", "zeros"), "sector.K1", m, p, p);
  fc.sector.K2 = parse_shaped_matrix(r.raw_or("sector.K2", "eye"), "sector.K2", m, p, p);
  fc.sector.kappa =
      parse_shaped_matrix(r.raw_or("sector.kappa", "eye"), "sector.kappa", m, m, p);
  fc.sector.K_L = r.scalar_or("sector.K_L", 0.0);
  fc.sector.N = parse_shaped_matrix(r.raw_or("sector.N", "eye * 0.1"), "sector.N", m, m, p);

  fc.grid_size = r.integer_or("analysis.grid_size", 2048);
  require(fc.grid_size >= 2, "config key 'analysis.grid_size': must be at least 2");
  fc.checkpoint_stride = r.integer_or("analysis.stride", 1);
  require(fc.checkpoint_stride >= 1, "config key 'analysis.stride': must be at least 1");
  const std::string cp = r.raw_or("analysis.checkpoints", "engaged");
  if (cp == "engaged" || cp == "all" || cp == "none") {
    fc.checkpoint_policy = cp;
  } else {
    fc.checkpoint_policy = "explicit";
    const Vector v = parse_vector(cp, "analysis.checkpoints");
    for (Eigen::Index i = 0; i < v.size(); ++i)
      fc.explicit_checkpoints.push_back(static_cast<long>(v(i)));
    std::sort(fc.explicit_checkpoints.begin(), fc.explicit_checkpoints.end());
  }

  fc.probe_box = r.scalar_or("sector.probe_box", 20.0);
  fc.probe_points = r.integer_or("sector.probe_points", 10000);
  require(fc.probe_points >= 2, "config key 'sector.probe_points': must be at least 2");

  r.finish();

  fc.sector.validate();
  fc.sim.checkpoints = resolve_checkpoints(fc);
  fc.sim.validate();
  return fc;
}

std::vector<long> resolve_checkpoints(const FullConfig& config) {
  std::vector<long> out;
  if (config.checkpoint_policy == "none") return out;
  if (config.checkpoint_policy == "explicit") {
    for (long k : config.explicit_checkpoints)
      if (k >= 0 && k <= config.sim.k_final) out.push_back(k);
    return out;
  }
  const long start = config.checkpoint_policy == "all" ? 0 : config.sim.k_engage;
  for (long k = start; k <= config.sim.k_final; k += config.checkpoint_stride) out.push_back(k);
  if (out.empty() || out.back() != config.sim.k_final) out.push_back(config.sim.k_final);
  return out;
}

}  // namespace lure_pcac
