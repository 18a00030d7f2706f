#include <doctest.h>

#include "tfm/caseio.hpp"
#include "tfm/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tfm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "tfm_caseio_test";
  fs::create_directories(d);
  return d / name;
}

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("empty document gives the default case") {
  const CaseConfig c = parse_config("");
  CHECK(c == CaseConfig{});
  CHECK(c.props.rho_g == 10.0);
  CHECK(c.props.rho_l == 1000.0);
  CHECK(c.props.mu_g == 2e-5);
  CHECK(c.props.mu_l == 5e-3);
  CHECK(c.props.d_b == 1e-3);
  CHECK(c.inlet_gas_speed == 0.0616);
  CHECK(c.inlet_alpha == 0.026);
  CHECK(c.ramp_time == 0.625);
  CHECK(c.inlet_sigma == 0.1);
  CHECK(c.inlet_half_width == 0.025);
  CHECK(c.bounded);
}

TEST_CASE("sections, comments and flags") {
  const CaseConfig c = parse_config("# comment\n[solver]\nbounded = false  # comparator\n\n[mesh]\nnx=10\ndiagonal = left\n");
  CHECK_FALSE(c.bounded);
  CHECK(c.nx == 10);
  CHECK(c.diagonal == DiagonalRule::Left);
}

TEST_CASE("errors name the line or the key") {
  CHECK(error_of("rho_l = -1").find("rho_l") != std::string::npos);
  CHECK(error_of("\n\nfoo = 1").find("line 3") != std::string::npos);
  CHECK(error_of("\n\nfoo = 1").find("foo") != std::string::npos);
  CHECK(error_of("nx 5").find("line 1") != std::string::npos);
  CHECK(error_of("nx = five").find("nx") != std::string::npos);
  CHECK(error_of("[mesh\nnx = 4").find("line 1") != std::string::npos);
  CHECK(error_of("nx = 4\nnx = 5").find("duplicate") != std::string::npos);
  CHECK(error_of("bounded = maybe").find("bounded") != std::string::npos);
  CHECK(error_of("inlet_alpha = 1.5").find("inlet_alpha") != std::string::npos);
  CHECK(error_of("t_end = -1").find("t_end") != std::string::npos);
}

TEST_CASE("dump and parse round trip") {
  CaseConfig c;
  c.nx = 7;
  c.props.mu_l = 1.0 / 3.0;
  c.t_end = 0.1 + 0.2;
  c.bounded = false;
  c.diagonal = DiagonalRule::Right;
  c.output_dir = "some/dir";
  CHECK(parse_config(dump_config(c)) == c);
  CHECK(parse_config(dump_config(CaseConfig{})) == CaseConfig{});
}

TEST_CASE("overrides") {
  CaseConfig c;
  apply_override(c, "nx=12");
  apply_override(c, " C_P = 0.25 ");
  CHECK(c.nx == 12);
  CHECK(c.C_P == 0.25);
  CHECK_THROWS_AS(apply_override(c, "nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "nx"), ConfigError);
}

TEST_CASE("inlet profiles") {
  const CaseConfig c;
  auto v = inlet_profiles(0.0, 1.0, c);
  CHECK(v.v_g_y == doctest::Approx(0.0616));
  CHECK(v.alpha_g == doctest::Approx(0.026));
  v = inlet_profiles(0.0, 0.0, c);
  CHECK(v.v_g_y == 0.0);
  CHECK(v.alpha_g == 0.0);
  v = inlet_profiles(0.025, 0.7, c);
  CHECK(v.v_g_y == doctest::Approx(0.0616 * std::exp(-50.0)).epsilon(1e-12));
  double prev = -1.0;
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto a = inlet_profiles(0.01, t, c), b = inlet_profiles(-0.01, t, c);
    CHECK(a.v_g_y == b.v_g_y);
    CHECK(a.alpha_g == b.alpha_g);
    CHECK(a.alpha_g >= prev);
    prev = a.alpha_g;
  }
  CHECK(inlet_profiles(0.01, 0.7, c).alpha_g == inlet_profiles(0.01, 2.0, c).alpha_g);
}

TEST_CASE("initial state") {
  CaseConfig c;
  c.nx = 4;
  c.ny = 8;
  const Discretization d = Discretization::build(build_mesh(c));
  const State s = initial_state(d, c);
  CHECK(max_abs(s.alpha_g.values()) == 0.0);
  CHECK(max_abs(s.v_g.values()) == 0.0);
  CHECK(max_abs(s.v_l.values()) == 0.0);
  const double P_s = 1000.0 * 9.81 * 0.1;
  const auto x = d.scalar->node_coords();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].y == 0.0) CHECK(s.p_l[i] * P_s == doctest::Approx(981.0));
    if (std::abs(x[i].y * 0.05 - 0.1) < 1e-12) CHECK(std::abs(s.p_l[i]) < 1e-12);
    CHECK(s.alpha_l[i] == 1.0);
  }
}

TEST_CASE("snapshot format and round trip") {
  auto mesh = std::make_shared<const Mesh>(generate_rect_mesh(1.0, 1.0, 1, 1, DiagonalRule::Right));
  const Discretization d = Discretization::build(mesh);
  State s = State::zeros(d);
  const fs::path p = scratch("zero.vtk");
  write_snapshot(s, p.string());
  const std::string text = slurp(p);
  CHECK(text.find("POINTS 4 double") != std::string::npos);
  CHECK(text.find("CELLS 2 8") != std::string::npos);
  const Snapshot r = read_snapshot(p.string());
  CHECK(r.points.size() == 4);
  CHECK(r.cells.size() == 2);
  for (double v : r.alpha_g) CHECK(v == 0.0);
  std::istringstream lines(text);
  std::string line;
  int triangles = 0;
  while (std::getline(lines, line))
    if (line.rfind("3 ", 0) == 0) ++triangles;
  CHECK(triangles == 2);

  CaseConfig c;
  c.nx = 6;
  c.ny = 10;
  const Discretization d2 = Discretization::build(build_mesh(c));
  State s2 = initial_state(d2, c);
  for (std::size_t i = 0; i < s2.alpha_g.size(); ++i) s2.alpha_g[i] = std::sin(0.37 * i) / 3.0;
  for (std::size_t i = 0; i < s2.v_g.size(); ++i) s2.v_g[i] = std::cos(0.11 * i) / 7.0;
  const fs::path q = scratch("field.vtk");
  write_snapshot(s2, q.string());
  const Snapshot r2 = read_snapshot(q.string());
  for (std::size_t i = 0; i < r2.alpha_g.size(); ++i) {
    CHECK(std::abs(r2.alpha_g[i] - s2.alpha_g[i]) <= 1e-12);
    CHECK(std::abs(r2.v_g[i].x - s2.v_g[2 * i]) <= 1e-12);
    CHECK(std::abs(r2.pressure[i] - s2.p_l[i]) <= 1e-12);
  }
  const fs::path q2 = scratch("field2.vtk");
  write_snapshot(s2, q2.string());
  CHECK(slurp(q) == slurp(q2));
  CHECK_THROWS_AS(write_snapshot(s2, "/nonexistent_dir/x.vtk"), IoError);
  CHECK_THROWS_AS(read_snapshot("/nonexistent_dir/x.vtk"), IoError);
}

TEST_CASE("time series rows") {
  const fs::path p = scratch("series.csv");
  write_timeseries_header(p.string());
  SeriesRow row;
  write_timeseries_row(row, p.string());
  row.accepted = false;
  row.t_seconds = 0.5;
  write_timeseries_row(row, p.string());
  std::istringstream in(slurp(p));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    ++n;
  }
  CHECK(n == 3);
  CHECK(timeseries_header().rfind("t_seconds,dt_seconds,holdup,min_alpha_g,max_alpha_g,", 0) == 0);
  CHECK(format_timeseries_row(row).back() == '0');
  CHECK(format_timeseries_row(SeriesRow{}) == "0,0,0,0,0,0,0,1");
}
