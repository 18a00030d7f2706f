#include "tfm/caseio.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace tfm {

namespace {

// shortest text that reads back to the same double
std::string fmt(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw ConfigError("key '" + std::string(key) + "': not an integer: '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("key '" + std::string(key) + "': not a boolean: '" + std::string(text) + "'");
}

struct Key {
  const char* section;
  const char* name;
  const char* unit;
  std::function<void(CaseConfig&, std::string_view)> set;
  std::function<std::string(const CaseConfig&)> get;
};

template <class T>
Key real(const char* sec, const char* name, const char* unit, T CaseConfig::*field) {
  return {sec, name, unit,
          [=](CaseConfig& c, std::string_view v) { c.*field = parse_double(name, v); },
          [=](const CaseConfig& c) { return fmt(c.*field); }};
}

Key real_in(const char* sec, const char* name, const char* unit, double& (*ref)(CaseConfig&)) {
  return {sec, name, unit,
          [=](CaseConfig& c, std::string_view v) { ref(c) = parse_double(name, v); },
          [=](const CaseConfig& c) { return fmt(ref(const_cast<CaseConfig&>(c))); }};
}

Key integer(const char* sec, const char* name, int CaseConfig::*field) {
  return {sec, name, "",
          [=](CaseConfig& c, std::string_view v) { c.*field = parse_int(name, v); },
          [=](const CaseConfig& c) { return std::to_string(c.*field); }};
}

Key boolean(const char* sec, const char* name, bool CaseConfig::*field) {
  return {sec, name, "",
          [=](CaseConfig& c, std::string_view v) { c.*field = parse_bool(name, v); },
          [=](const CaseConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      real_in("fluid", "rho_g", "kg/m^3", [](CaseConfig& c) -> double& { return c.props.rho_g; }),
      real_in("fluid", "rho_l", "kg/m^3", [](CaseConfig& c) -> double& { return c.props.rho_l; }),
      real_in("fluid", "mu_g", "Pa s", [](CaseConfig& c) -> double& { return c.props.mu_g; }),
      real_in("fluid", "mu_l", "Pa s", [](CaseConfig& c) -> double& { return c.props.mu_l; }),
      real_in("fluid", "d_b", "m", [](CaseConfig& c) -> double& { return c.props.d_b; }),
      real_in("fluid", "g", "m/s^2", [](CaseConfig& c) -> double& { return c.props.g; }),
      real_in("scales", "x_s", "m", [](CaseConfig& c) -> double& { return c.scales.x_s; }),
      real_in("scales", "v_s", "m/s", [](CaseConfig& c) -> double& { return c.scales.v_s; }),
      real_in("scales", "g_s", "m/s^2", [](CaseConfig& c) -> double& { return c.scales.g_s; }),
      real_in("scales", "h_ref", "m", [](CaseConfig& c) -> double& { return c.scales.h_ref; }),
      real("model", "C_P", "", &CaseConfig::C_P),
      real("model", "alpha_floor", "", &CaseConfig::alpha_floor),
      boolean("model", "implicit_gas_drag", &CaseConfig::implicit_gas_drag),
      boolean("model", "supg", &CaseConfig::supg),
      integer("mesh", "nx", &CaseConfig::nx),
      integer("mesh", "ny", &CaseConfig::ny),
      {"mesh", "diagonal", "",
       [](CaseConfig& c, std::string_view v) {
         try {
           c.diagonal = parse_diagonal_rule(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError("key 'diagonal': " + std::string(e.what()));
         }
       },
       [](const CaseConfig& c) { return std::string(to_string(c.diagonal)); }},
      real("mesh", "width", "m", &CaseConfig::width),
      real("mesh", "height", "m", &CaseConfig::height),
      boolean("solver", "bounded", &CaseConfig::bounded),
      real("solver", "tol_step", "", &CaseConfig::tol_step),
      real("solver", "tol_linear", "", &CaseConfig::tol_linear),
      real("solver", "tol_vi", "", &CaseConfig::tol_vi),
      integer("solver", "max_linear_iter", &CaseConfig::max_linear_iter),
      integer("solver", "max_vi_iter", &CaseConfig::max_vi_iter),
      real("solver", "dt_initial", "s", &CaseConfig::dt_initial),
      real("solver", "dt_min", "s", &CaseConfig::dt_min),
      real("solver", "dt_max", "s", &CaseConfig::dt_max),
      real("solver", "t_end", "s", &CaseConfig::t_end),
      real("inlet", "inlet_gas_speed", "m/s", &CaseConfig::inlet_gas_speed),
      real("inlet", "inlet_alpha", "", &CaseConfig::inlet_alpha),
      real("inlet", "ramp_time", "s", &CaseConfig::ramp_time),
      real("inlet", "inlet_sigma", "", &CaseConfig::inlet_sigma),
      real("inlet", "inlet_half_width", "m", &CaseConfig::inlet_half_width),
      {"output", "output_dir", "",
       [](CaseConfig& c, std::string_view v) { c.output_dir = std::string(v); },
       [](const CaseConfig& c) { return c.output_dir; }},
      real("output", "snapshot_interval", "s", &CaseConfig::snapshot_interval),
      boolean("output", "log_rejected", &CaseConfig::log_rejected),
      real("output", "slip_alpha_floor", "", &CaseConfig::slip_alpha_floor),
  };
  return table;
}

const Key& find_key(std::string_view name, const std::string& where) {
  for (const Key& k : keys())
    if (name == k.name) return k;
  throw ConfigError(where + "unknown key '" + std::string(name) + "'");
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError("key '" + std::string(key) + "': " + what);
}

} // namespace

void CaseConfig::validate() const {
  require(props.rho_g > 0.0, "rho_g", "must be positive");
  require(props.rho_l > 0.0, "rho_l", "must be positive");
  require(props.mu_g > 0.0, "mu_g", "must be positive");
  require(props.mu_l > 0.0, "mu_l", "must be positive");
  require(props.d_b > 0.0, "d_b", "must be positive");
  require(props.g > 0.0, "g", "must be positive");
  require(scales.x_s > 0.0, "x_s", "must be positive");
  require(scales.v_s > 0.0, "v_s", "must be positive");
  require(scales.g_s > 0.0, "g_s", "must be positive");
  require(scales.h_ref > 0.0, "h_ref", "must be positive");
  require(C_P >= 0.0, "C_P", "must be nonnegative");
  require(alpha_floor > 0.0 && alpha_floor < 1.0, "alpha_floor", "must lie in (0, 1)");
  require(nx >= 1, "nx", "must be at least 1");
  require(ny >= 1, "ny", "must be at least 1");
  require(width > 0.0, "width", "must be positive");
  require(height > 0.0, "height", "must be positive");
  require(tol_step > 0.0, "tol_step", "must be positive");
  require(tol_linear > 0.0, "tol_linear", "must be positive");
  require(tol_vi > 0.0, "tol_vi", "must be positive");
  require(max_linear_iter >= 1, "max_linear_iter", "must be at least 1");
  require(max_vi_iter >= 1, "max_vi_iter", "must be at least 1");
  require(dt_min > 0.0, "dt_min", "must be positive");
  require(dt_max >= dt_min, "dt_max", "must be at least dt_min");
  require(dt_initial >= dt_min && dt_initial <= dt_max, "dt_initial", "must lie in [dt_min, dt_max]");
  require(t_end >= 0.0, "t_end", "must be nonnegative");
  require(inlet_gas_speed >= 0.0, "inlet_gas_speed", "must be nonnegative");
  require(inlet_alpha >= 0.0 && inlet_alpha <= 1.0, "inlet_alpha", "must lie in [0, 1]");
  require(ramp_time > 0.0, "ramp_time", "must be positive");
  require(inlet_sigma > 0.0, "inlet_sigma", "must be positive");
  require(inlet_half_width > 0.0, "inlet_half_width", "must be positive");
  require(slip_alpha_floor > 0.0 && slip_alpha_floor < 1.0, "slip_alpha_floor", "must lie in (0, 1)");
}

CaseConfig parse_config(std::string_view text) {
  CaseConfig c;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || trim(line.substr(1, line.size() - 2)).empty())
        throw ConfigError(where + "malformed section header");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    const Key& k = find_key(key, where);
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    if (value.empty() && std::string_view(k.name) != "output_dir")
      throw ConfigError(where + "missing value for '" + std::string(key) + "'");
    try {
      k.set(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  c.validate();
  return c;
}

CaseConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(CaseConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' lacks '='");
  const std::string_view key = trim(assignment.substr(0, eq));
  find_key(key, "override: ").set(config, trim(assignment.substr(eq + 1)));
}

std::string dump_config(const CaseConfig& config) {
  std::string out;
  std::string section;
  for (const Key& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(config);
    if (*k.unit) out += std::string("  # ") + k.unit;
    out += '\n';
  }
  return out;
}

InletValues inlet_profiles(double x, double t, const CaseConfig& config) {
  const double ramp = std::clamp(t / config.ramp_time, 0.0, 1.0);
  const double r = x / config.inlet_half_width;
  const double shape = std::exp(-r * r / (2.0 * config.inlet_sigma * config.inlet_sigma));
  return {ramp * config.inlet_gas_speed * shape, ramp * config.inlet_alpha * shape};
}

std::shared_ptr<const Mesh> build_mesh(const CaseConfig& config) {
  return std::make_shared<const Mesh>(generate_rect_mesh(config.width / config.scales.x_s,
                                                         config.height / config.scales.x_s,
                                                         config.nx, config.ny, config.diagonal));
}

State initial_state(const Discretization& disc, const CaseConfig& config) {
  State s = State::zeros(disc);
  const double P_s = config.props.rho_l * config.scales.g_s * config.scales.h_ref;
  const auto nodes = disc.scalar->node_coords();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double y = nodes[i].y * config.scales.x_s;
    s.p_l[i] = config.props.rho_l * config.scales.g_s * (config.scales.h_ref - y) / P_s;
  }
  return s;
}

void write_snapshot(const State& state, const std::string& path) {
  const Mesh& mesh = state.alpha_g.space().mesh();
  const Vector ag = vertex_values(state.alpha_g);
  const Vector p = vertex_values(state.p_l);
  const Vector vg = vertex_values(state.v_g);
  const Vector vl = vertex_values(state.v_l);
  std::string out;
  out.reserve(mesh.num_vertices() * 200);
  out += "# vtk DataFile Version 3.0\n";
  out += "tfm snapshot t_tilde=" + fmt(state.t_tilde) + "\n";
  out += "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(mesh.num_vertices()) + " double\n";
  for (const Vec2& v : mesh.vertices()) out += fmt(v.x) + " " + fmt(v.y) + " 0\n";
  const std::size_t nc = mesh.num_cells();
  out += "CELLS " + std::to_string(nc) + " " + std::to_string(4 * nc) + "\n";
  for (const Cell& c : mesh.cells())
    out += "3 " + std::to_string(c[0]) + " " + std::to_string(c[1]) + " " + std::to_string(c[2]) + "\n";
  out += "CELL_TYPES " + std::to_string(nc) + "\n";
  for (std::size_t c = 0; c < nc; ++c) out += "5\n";
  out += "POINT_DATA " + std::to_string(mesh.num_vertices()) + "\n";
  const auto scalars = [&](const char* name, const Vector& v) {
    out += std::string("SCALARS ") + name + " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out += fmt(x) + "\n";
  };
  const auto vectors = [&](const char* name, const Vector& v) {
    out += std::string("VECTORS ") + name + " double\n";
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) out += fmt(v[i]) + " " + fmt(v[i + 1]) + " 0\n";
  };
  scalars("alpha_g", ag);
  scalars("pressure", p);
  vectors("v_g", vg);
  vectors("v_l", vl);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << out;
  if (!f) throw IoError("write failed for '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  Snapshot s;
  std::string tok;
  std::size_t npoints = 0;
  const auto fail = [&](const std::string& what) { throw IoError("'" + path + "': " + what); };
  while (in >> tok) {
    if (tok == "POINTS") {
      std::string type;
      in >> npoints >> type;
      s.points.resize(npoints);
      for (auto& p : s.points) {
        double z;
        in >> p.x >> p.y >> z;
      }
    } else if (tok == "CELLS") {
      std::size_t n, total;
      in >> n >> total;
      s.cells.resize(n);
      for (auto& c : s.cells) {
        int k;
        in >> k >> c[0] >> c[1] >> c[2];
        if (k != 3) fail("only triangles are supported");
      }
    } else if (tok == "SCALARS") {
      std::string name, type, lt, def;
      int ncomp;
      in >> name >> type >> ncomp >> lt >> def;
      Vector v(npoints);
      for (double& x : v) in >> x;
      if (name == "alpha_g") s.alpha_g = std::move(v);
      else if (name == "pressure") s.pressure = std::move(v);
    } else if (tok == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      std::vector<Vec2> v(npoints);
      for (auto& p : v) {
        double z;
        in >> p.x >> p.y >> z;
      }
      if (name == "v_g") s.v_g = std::move(v);
      else if (name == "v_l") s.v_l = std::move(v);
    }
    if (in.fail()) fail("malformed data near '" + tok + "'");
  }
  if (s.points.empty() || s.cells.empty() || s.alpha_g.size() != s.points.size())
    fail("missing points, cells or alpha_g");
  return s;
}

std::string timeseries_header() {
  return "t_seconds,dt_seconds,holdup,min_alpha_g,max_alpha_g,slip_velocity_avg_mps,"
         "bubble_reynolds_avg,accepted";
}

std::string format_timeseries_row(const SeriesRow& r) {
  return fmt(r.t_seconds) + "," + fmt(r.dt_seconds) + "," + fmt(r.holdup) + "," + fmt(r.min_alpha_g) +
         "," + fmt(r.max_alpha_g) + "," + fmt(r.slip_velocity_avg_mps) + "," +
         fmt(r.bubble_reynolds_avg) + "," + (r.accepted ? "1" : "0");
}

void write_timeseries_header(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << timeseries_header() << '\n';
}

void write_timeseries_row(const SeriesRow& row, const std::string& path) {
  std::ofstream f(path, std::ios::app);
  if (!f) throw IoError("cannot open '" + path + "' for appending");
  f << format_timeseries_row(row) << '\n';
  if (!f) throw IoError("write failed for '" + path + "'");
}

} // namespace tfm
