// tfm: run, analyze and check two-fluid bubble-column simulations.

#include "tfm/caseio.hpp"
#include "tfm/errors.hpp"
#include "tfm/ipcs.hpp"
#include "tfm/physics.hpp"
#include "tfm/post.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tfm;

namespace {

struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<double> t_end;
  bool unbounded = false;
};

CaseConfig load(const ConfigOptions& o) {
  CaseConfig c = o.config_path.empty() ? CaseConfig{} : load_config(o.config_path);
  for (const auto& s : o.overrides) apply_override(c, s);
  if (o.t_end) c.t_end = *o.t_end;
  if (o.unbounded) c.bounded = false;
  c.validate();
  return c;
}

void add_config_flags(CLI::App* sub, ConfigOptions& o) {
  sub->add_option("--config", o.config_path, "case file (key = value, optional [sections])");
  sub->add_option("--set", o.overrides, "override one key, e.g. --set nx=50")->allow_extra_args(false);
}

std::pair<int, int> parse_dims(const std::string& text, double aspect) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) {
      const int nx = std::stoi(text);
      return {nx, std::max(1, static_cast<int>(std::lround(nx * aspect)))};
    }
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad grid size '" + text + "' (expected N or NXxNY)");
  }
}

std::string out_dir(const std::string& flag, const CaseConfig& c) {
  if (!flag.empty()) return flag;
  return c.output_dir.empty() ? std::string("tfm_out") : c.output_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << text;
}

RunRecord run_case(CaseConfig c, const std::string& dir) {
  c.output_dir = dir;
  fs::create_directories(dir);
  write_text(fs::path(dir) / "case.cfg", dump_config(c));
  double next_report = 0.0;
  const double t_s = c.scales.x_s / c.scales.v_s;
  return run(c, [&](const State& s, const StepReport& r) {
    const double t = s.t_tilde * t_s;
    if (r.accepted && t >= next_report) {
      std::fprintf(stderr, "  t = %.4f s  dt = %.3e s  min(alpha_g) = %.3e\n", t, r.dt_used * t_s,
                   r.min_alpha_g);
      next_report = t + 0.05;
    }
  });
}

int cmd_run(const ConfigOptions& o, const std::string& out) {
  const CaseConfig c = load(o);
  const std::string dir = out_dir(out, c);
  const RunRecord rec = run_case(c, dir);
  double min_alpha = std::numeric_limits<double>::infinity();
  for (const auto& row : rec.series)
    if (row.accepted) min_alpha = std::min(min_alpha, row.min_alpha_g);
  std::printf("steps accepted: %d  rejected: %d  snapshots: %d\n", rec.accepted_steps,
              rec.rejected_steps, rec.snapshots);
  std::printf("final holdup: %.6g\n", rec.series.back().holdup);
  std::printf("min alpha_g over run: %.6g\n", min_alpha);
  std::printf("output: %s\n", dir.c_str());
  return 0;
}

int cmd_analyze(const std::string& snapshot, const std::string& grid, const std::string& out, int bins,
                double floor) {
  const Snapshot snap = read_snapshot(snapshot);
  auto mesh = std::make_shared<const Mesh>(mesh_from_triangles(snap.points, snap.cells));
  auto space = std::make_shared<const FunctionSpace>(mesh, SpaceKind::ScalarP1);
  const FeField alpha(space, snap.alpha_g);
  const auto [nx, ny] = parse_dims(grid, mesh->height() / mesh->width());
  const PowerSpectrum psd = power_spectrum_2d(sample_to_grid(alpha, nx, ny));
  const RadialSpectrum radial = radial_average(psd);
  const Histogram hist = psd_histogram(psd, bins, floor);

  const fs::path dir = out.empty() ? fs::path(snapshot).parent_path() : fs::path(out);
  if (!dir.empty()) fs::create_directories(dir);
  std::string r = "k_bin,power\n";
  char buf[96];
  for (std::size_t i = 0; i < radial.k.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", radial.k[i], radial.power[i]);
    r += buf;
  }
  write_text(dir / "spectrum_radial.csv", r);
  std::string h = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu\n", hist.edges[i], hist.edges[i + 1], hist.counts[i]);
    h += buf;
  }
  write_text(dir / "spectrum_hist.csv", h);
  std::printf("holdup: %.6g\n", gas_holdup(alpha));
  std::printf("grid: %dx%d  radial bins: %zu  histogram bins: %zu\n", nx, ny, radial.k.size(),
              hist.counts.size());
  std::printf("output: %s\n", dir.string().c_str());
  return 0;
}

int cmd_terminal(const ConfigOptions& o) {
  const CaseConfig c = load(o);
  const TerminalEstimate clift = clift_terminal_reynolds(c.props);
  const double balance = terminal_velocity_balance(c.props);
  std::printf("Clift correlation:    N_D = %.2f  Re_T = %.3f  v_T = %.4f m/s\n", clift.N_D, clift.Re_T,
              clift.v_T);
  std::printf("Schiller-Naumann balance:                 v_T = %.4f m/s  (Re = %.3f)\n", balance,
              c.props.rho_l * balance * c.props.d_b / c.props.mu_l);
  std::printf("relative difference: %.2f%%\n", 100.0 * (balance - clift.v_T) / clift.v_T);
  return 0;
}

int cmd_convergence(const ConfigOptions& o, const std::string& out, const std::string& meshes) {
  const CaseConfig base = load(o);
  const std::string dir = out_dir(out, base);
  std::vector<std::pair<int, int>> dims;
  std::size_t pos = 0;
  while (pos <= meshes.size()) {
    const auto comma = std::min(meshes.find(',', pos), meshes.size());
    if (comma > pos) dims.push_back(parse_dims(meshes.substr(pos, comma - pos), base.height / base.width));
    pos = comma + 1;
  }
  if (dims.size() < 2) throw ConfigError("--meshes needs at least two entries");

  std::vector<Vector> times(dims.size()), holdups(dims.size());
  for (std::size_t m = 0; m < dims.size(); ++m) {
    CaseConfig c = base;
    c.nx = dims[m].first;
    c.ny = dims[m].second;
    const std::string sub = (fs::path(dir) / ("mesh_" + std::to_string(c.nx) + "x" + std::to_string(c.ny))).string();
    std::fprintf(stderr, "mesh %dx%d (%d cells)\n", c.nx, c.ny, 2 * c.nx * c.ny);
    const RunRecord rec = run_case(c, sub);
    for (const auto& row : rec.series) {
      if (!row.accepted) continue;
      times[m].push_back(row.t_seconds);
      holdups[m].push_back(row.holdup);
    }
  }
  double peak = 0.0;
  for (const auto& h : holdups) peak = std::max(peak, *std::max_element(h.begin(), h.end()));
  std::string csv = "mesh_a,mesh_b,max_deviation,relative_to_peak\n";
  double worst = 0.0;
  char buf[160];
  for (std::size_t a = 0; a < dims.size(); ++a) {
    for (std::size_t b = a + 1; b < dims.size(); ++b) {
      const double d = max_series_deviation(times[a], holdups[a], times[b], holdups[b]);
      const double rel = peak > 0.0 ? d / peak : 0.0;
      worst = std::max(worst, rel);
      std::snprintf(buf, sizeof buf, "%dx%d,%dx%d,%.17g,%.17g\n", dims[a].first, dims[a].second,
                    dims[b].first, dims[b].second, d, rel);
      csv += buf;
      std::printf("%dx%d vs %dx%d: max holdup deviation %.4g (%.2f%% of peak)\n", dims[a].first,
                  dims[a].second, dims[b].first, dims[b].second, d, 100.0 * rel);
    }
  }
  write_text(fs::path(dir) / "convergence.csv", csv);
  std::printf("peak holdup: %.6g  worst relative deviation: %.2f%%\n", peak, 100.0 * worst);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-fluid bubble column solver with bounded phase fractions"};
  app.require_subcommand(1);

  ConfigOptions run_opts, tv_opts, conv_opts;
  std::string run_out, conv_out, analyze_out, snapshot, grid = "64x128", meshes = "24,48";
  int bins = 40;
  double floor = 1e-30;

  auto* run_cmd = app.add_subcommand("run", "simulate the case and write series and snapshots");
  add_config_flags(run_cmd, run_opts);
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_option("--t-end", run_opts.t_end, "end time in seconds");
  run_cmd->add_flag("--unbounded", run_opts.unbounded, "plain linear alpha update");

  auto* an_cmd = app.add_subcommand("analyze", "spectral analysis of one snapshot");
  an_cmd->add_option("snapshot", snapshot, "snapshot .vtk file")->required();
  an_cmd->add_option("--grid", grid, "sample grid NXxNY");
  an_cmd->add_option("--out", analyze_out, "output directory (default: next to the snapshot)");
  an_cmd->add_option("--bins", bins, "histogram bins");
  an_cmd->add_option("--floor", floor, "histogram floor");

  auto* tv_cmd = app.add_subcommand("terminal-velocity", "bubble terminal velocity checks");
  add_config_flags(tv_cmd, tv_opts);

  auto* conv_cmd = app.add_subcommand("convergence", "repeat the run on several meshes");
  add_config_flags(conv_cmd, conv_opts);
  conv_cmd->add_option("--out", conv_out, "output directory");
  conv_cmd->add_option("--t-end", conv_opts.t_end, "end time in seconds");
  conv_cmd->add_flag("--unbounded", conv_opts.unbounded, "plain linear alpha update");
  conv_cmd->add_option("--meshes", meshes, "comma-separated nx or NXxNY list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, run_out);
    if (*an_cmd) return cmd_analyze(snapshot, grid, analyze_out, bins, floor);
    if (*tv_cmd) return cmd_terminal(tv_opts);
    if (*conv_cmd) return cmd_convergence(conv_opts, conv_out, meshes);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 2;
  } catch (const StepFailure& e) {
    std::cerr << "solver failure in " << e.substep() << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
