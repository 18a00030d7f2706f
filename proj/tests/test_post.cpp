#include <doctest.h>

#include "tfm/caseio.hpp"
#include "tfm/errors.hpp"
#include "tfm/post.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace tfm;

namespace {

struct Column {
  CaseConfig cfg;
  Discretization disc;
  Column() {
    cfg.nx = 8;
    cfg.ny = 16;
    disc = Discretization::build(build_mesh(cfg));
  }
};

UniformGridSample grid_of(int nx, int ny, const std::function<double(int, int)>& f) {
  UniformGridSample g;
  g.nx = nx;
  g.ny = ny;
  g.spacing = {1.0, 1.0};
  g.values.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) g.values[static_cast<std::size_t>(j) * nx + i] = f(i, j);
  return g;
}

double sum(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

} // namespace

TEST_CASE("gas holdup") {
  Column c;
  const auto p1 = c.disc.scalar;
  CHECK(gas_holdup(FeField(p1)) == 0.0);
  CHECK(gas_holdup(interpolate(p1, [](Vec2, int) { return 0.5; })) == doctest::Approx(0.5));
  const double H = c.disc.mesh->height();
  CHECK(gas_holdup(interpolate(p1, [&](Vec2 p, int) { return p.y / H; })) == doctest::Approx(0.5));
  const FeField beta = interpolate(p1, [](Vec2 p, int) { return 0.1 * p.x * p.x + 0.01 * p.y; });
  const FeField one_minus = interpolate(p1, [](Vec2 p, int) { return 1.0 - 0.1 * p.x * p.x - 0.01 * p.y; });
  CHECK(gas_holdup(one_minus) == doctest::Approx(1.0 - gas_holdup(beta)));
}

TEST_CASE("slip velocity and bubble Reynolds number") {
  Column c;
  State s = initial_state(c.disc, c.cfg);
  for (std::size_t i = 0; i < s.alpha_g.size(); ++i) s.alpha_g[i] = 0.01;
  const double vr = 0.0572 / c.cfg.scales.v_s;
  for (std::size_t n = 0; n < c.disc.vector->num_nodes(); ++n) {
    s.v_l[2 * n + 1] = 0.3;
    s.v_g[2 * n + 1] = 0.3 + vr;
  }
  SlipStats st = slip_and_reynolds(s, c.cfg.props, c.cfg.scales);
  CHECK_FALSE(st.empty);
  CHECK(st.slip_mps == doctest::Approx(0.0572));
  CHECK(st.bubble_reynolds == doctest::Approx(11.44));
  s.v_g = s.v_l;
  st = slip_and_reynolds(s, c.cfg.props, c.cfg.scales);
  CHECK(st.slip_mps == 0.0);
  CHECK(st.bubble_reynolds == 0.0);
  for (std::size_t i = 0; i < s.alpha_g.size(); ++i) s.alpha_g[i] = 0.001;
  st = slip_and_reynolds(s, c.cfg.props, c.cfg.scales);
  CHECK(st.empty);
  CHECK(st.slip_mps == 0.0);
}

TEST_CASE("sampling onto a uniform grid") {
  Column c;
  const auto p1 = c.disc.scalar;
  const UniformGridSample k = sample_to_grid(interpolate(p1, [](Vec2, int) { return 0.3; }), 5, 7);
  for (double v : k.values) CHECK(v == doctest::Approx(0.3));
  const UniformGridSample l = sample_to_grid(interpolate(p1, [](Vec2 p, int) { return 2.0 * p.x - p.y; }), 9, 13);
  for (int j = 0; j < 13; ++j)
    for (int i = 0; i < 9; ++i) {
      const double x = l.origin.x + (i + 0.5) * l.spacing.x, y = l.origin.y + (j + 0.5) * l.spacing.y;
      CHECK(l.at(i, j) == doctest::Approx(2.0 * x - y));
    }
  const FeField bump = interpolate(p1, [](Vec2 p, int) { return std::exp(-4.0 * (p.x * p.x + (p.y - 1.0) * (p.y - 1.0))); });
  const UniformGridSample g = sample_to_grid(bump, 32, 64);
  CHECK(sum(g.values) / g.values.size() == doctest::Approx(gas_holdup(bump)).epsilon(1.0 / 32 + 1.0 / 64));
  CHECK_THROWS_AS(sample_to_grid(bump, 1, 4), InvalidArgument);
}

TEST_CASE("power spectrum of simple fields") {
  const PowerSpectrum flat = power_spectrum_2d(grid_of(8, 6, [](int, int) { return 4.2; }));
  for (double v : flat.power) CHECK(std::abs(v) < 1e-24);
  const int k = 3, nx = 16, ny = 8;
  const PowerSpectrum tone = power_spectrum_2d(
      grid_of(nx, ny, [&](int i, int) { return std::cos(2.0 * std::numbers::pi * k * i / nx); }));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (j == 0 && (i == k || i == nx - k))
        CHECK(tone.at(i, j) == doctest::Approx(nx * ny / 4.0));
      else
        CHECK(std::abs(tone.at(i, j)) < 1e-10);
    }
}

TEST_CASE("Parseval identity on a random field") {
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  const UniformGridSample g = grid_of(24, 18, [&](int, int) { return n(rng); });
  const PowerSpectrum p = power_spectrum_2d(g);
  double mean = sum(g.values) / g.values.size(), var = 0.0;
  for (double v : g.values) var += (v - mean) * (v - mean);
  CHECK(sum(p.power) == doctest::Approx(var).epsilon(1e-10));
}

TEST_CASE("radial average") {
  const int nx = 16, ny = 16, k = 5;
  const PowerSpectrum tone = power_spectrum_2d(
      grid_of(nx, ny, [&](int i, int) { return std::sin(2.0 * std::numbers::pi * k * i / nx); }));
  const RadialSpectrum r = radial_average(tone);
  for (std::size_t b = 0; b < r.k.size(); ++b) {
    if (r.k[b] == k)
      CHECK(r.power[b] > 1.0);
    else
      CHECK(std::abs(r.power[b]) < 1e-10);
  }
  double total = 0.0;
  for (std::size_t b = 0; b < r.k.size(); ++b) total += r.power[b] * r.count[b];
  CHECK(total == doctest::Approx(sum(tone.power)).epsilon(1e-12));
  PowerSpectrum zero{4, 4, Vector(16, 0.0)};
  for (double v : radial_average(zero).power) CHECK(v == 0.0);
}

TEST_CASE("radial spectrum of an isotropic Gaussian matches the analytic form") {
  const int n = 64;
  const double s = 4.0;
  const UniformGridSample g = grid_of(n, n, [&](int i, int j) {
    const double dx = i - n / 2, dy = j - n / 2;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
  });
  const RadialSpectrum r = radial_average(power_spectrum_2d(g));
  // continuous transform 2 pi s^2 exp(-2 pi^2 s^2 |k|^2 / n^2), squared over n^2
  const auto wrap = [&](int i) { return i <= n / 2 ? i : i - n; };
  std::vector<double> sum_a(r.k.size(), 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double k2 = wrap(i) * wrap(i) + wrap(j) * wrap(j);
      const int bin = static_cast<int>(std::lround(std::sqrt(k2)));
      const double amp = 2.0 * std::numbers::pi * s * s * std::exp(-2.0 * std::numbers::pi * std::numbers::pi * s * s * k2 / (n * n));
      for (std::size_t b = 0; b < r.k.size(); ++b)
        if (r.k[b] == bin) sum_a[b] += amp * amp / (n * n);
    }
  const double peak = sum_a[1] / r.count[1];
  int compared = 0;
  for (std::size_t b = 1; b < r.k.size(); ++b) {
    const double analytic = sum_a[b] / r.count[b];
    if (analytic < 1e-10 * peak) continue;
    CHECK(r.power[b] == doctest::Approx(analytic).epsilon(0.05));
    if (b > 1) CHECK(r.power[b] < r.power[b - 1]);
    ++compared;
  }
  CHECK(compared >= 8);
}

TEST_CASE("psd histogram") {
  PowerSpectrum p{4, 1, {1e-40, 1e-35, 0.0, 1e-31}};
  CHECK(psd_histogram(p, 5).counts.empty());
  p.power = {1e-3, 1e-2, 1e-1, 1.0, 0.5, 1e-40};
  const Histogram h = psd_histogram(p, 3);
  REQUIRE(h.counts.size() == 3);
  CHECK(h.edges.size() == 4);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 5);
  CHECK(h.edges.front() == doctest::Approx(1e-3));
  CHECK(h.edges.back() == doctest::Approx(1.0));
  p.power.push_back(0.0);
  total = 0;
  for (auto c : psd_histogram(p, 4, 0.0).counts) total += c;
  CHECK(total == p.power.size());
  CHECK_THROWS_AS(psd_histogram(p, 0), InvalidArgument);
}

TEST_CASE("series deviation") {
  const Vector ta{0.0, 1.0, 2.0}, a{0.0, 1.0, 2.0};
  const Vector tb{0.0, 0.5, 2.0}, b{0.0, 0.5, 2.5};
  CHECK(max_series_deviation(ta, a, tb, b) == doctest::Approx(0.5));
  CHECK(max_series_deviation(ta, a, ta, a) == 0.0);
}
