#include "tfm/post.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace tfm {

double gas_holdup(const FeField& alpha_g) {
  if (alpha_g.space().kind() != SpaceKind::ScalarP1) throw InvalidArgument("holdup expects a P1 field");
  const Mesh& mesh = alpha_g.space().mesh();
  double area = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) area += mesh.cell_area(static_cast<int>(c));
  return integrate(alpha_g) / area;
}

SlipStats slip_and_reynolds(const State& state, const FluidProperties& props, const Scales& scales,
                            double alpha_floor) {
  if (!(alpha_floor > 0.0 && alpha_floor < 1.0)) throw InvalidArgument("alpha_floor must lie in (0, 1)");
  const Vector ag = vertex_values(state.alpha_g);
  const Vector vg = vertex_values(state.v_g);
  const Vector vl = vertex_values(state.v_l);
  SlipStats s;
  double sum = 0.0;
  for (std::size_t i = 0; i < ag.size(); ++i) {
    if (ag[i] < alpha_floor) continue;
    sum += std::hypot(vg[2 * i] - vl[2 * i], vg[2 * i + 1] - vl[2 * i + 1]);
    ++s.nodes;
  }
  if (s.nodes == 0) return s;
  s.empty = false;
  s.slip_mps = sum / static_cast<double>(s.nodes) * scales.v_s;
  s.bubble_reynolds = props.rho_l * s.slip_mps * props.d_b / props.mu_l;
  return s;
}

UniformGridSample sample_to_grid(const FeField& field, int nx, int ny) {
  if (nx < 2 || ny < 2) throw InvalidArgument("sample grid needs at least 2 x 2 points");
  const Mesh& mesh = field.space().mesh();
  UniformGridSample g;
  g.nx = nx;
  g.ny = ny;
  g.origin = {-0.5 * mesh.width(), 0.0};
  g.spacing = {mesh.width() / nx, mesh.height() / ny};
  g.values.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      g.values[static_cast<std::size_t>(j) * nx + i] =
          evaluate(field, {g.origin.x + (i + 0.5) * g.spacing.x, g.origin.y + (j + 0.5) * g.spacing.y});
  return g;
}

namespace {

using cplx = std::complex<double>;

/// In-place direct DFT of n values spaced `stride` apart.
void dft(cplx* data, int n, std::size_t stride, const std::vector<cplx>& twiddle, std::vector<cplx>& tmp) {
  tmp.assign(n, cplx{});
  for (int k = 0; k < n; ++k) {
    cplx acc{};
    for (int m = 0; m < n; ++m)
      acc += data[m * stride] * twiddle[(static_cast<std::size_t>(k) * m) % n];
    tmp[k] = acc;
  }
  for (int k = 0; k < n; ++k) data[k * stride] = tmp[k];
}

std::vector<cplx> twiddles(int n) {
  std::vector<cplx> w(n);
  for (int k = 0; k < n; ++k) w[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / n);
  return w;
}

} // namespace

PowerSpectrum power_spectrum_2d(const UniformGridSample& grid) {
  const int nx = grid.nx, ny = grid.ny;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  if (nx < 1 || ny < 1 || grid.values.size() != n) throw InvalidArgument("grid dimensions disagree");
  double mean = 0.0;
  for (double v : grid.values) {
    if (!std::isfinite(v)) throw InvalidArgument("grid contains non-finite values");
    mean += v;
  }
  mean /= static_cast<double>(n);
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = grid.values[i] - mean;
  std::vector<cplx> tmp;
  const auto wx = twiddles(nx), wy = twiddles(ny);
  for (int j = 0; j < ny; ++j) dft(f.data() + static_cast<std::size_t>(j) * nx, nx, 1, wx, tmp);
  for (int i = 0; i < nx; ++i) dft(f.data() + i, ny, nx, wy, tmp);
  PowerSpectrum p{nx, ny, Vector(n)};
  for (std::size_t i = 0; i < n; ++i) p.power[i] = std::norm(f[i]) / static_cast<double>(n);
  return p;
}

RadialSpectrum radial_average(const PowerSpectrum& psd) {
  const int nx = psd.nx, ny = psd.ny;
  const auto wrap = [](int i, int n) { return i <= n / 2 ? i : i - n; };
  const int kmax = static_cast<int>(std::ceil(std::hypot(nx / 2 + 1, ny / 2 + 1)));
  Vector sum(kmax + 1, 0.0);
  std::vector<int> count(kmax + 1, 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int r = static_cast<int>(std::lround(std::hypot(wrap(i, nx), wrap(j, ny))));
      sum[r] += psd.at(i, j);
      ++count[r];
    }
  }
  RadialSpectrum out;
  for (int r = 0; r <= kmax; ++r) {
    if (count[r] == 0) continue;
    out.k.push_back(r);
    out.power.push_back(sum[r] / count[r]);
    out.count.push_back(count[r]);
  }
  return out;
}

Histogram psd_histogram(const PowerSpectrum& psd, int bins, double floor) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  if (!(floor >= 0.0)) throw InvalidArgument("histogram floor must be nonnegative");
  Vector kept;
  for (double v : psd.power)
    if (v > floor || (floor == 0.0 && v >= 0.0)) kept.push_back(v);
  Histogram h;
  double lo = 1e300, hi = 0.0;
  for (double v : kept) {
    if (v > 0.0) lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (kept.empty()) return h;
  if (hi <= 0.0) lo = hi = 1.0; // only zeros
  if (hi <= lo) hi = lo * 10.0, lo = lo / 10.0;
  const double llo = std::log10(lo), lhi = std::log10(hi);
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = std::pow(10.0, llo + (lhi - llo) * b / bins);
  h.edges.front() = lo;
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : kept) {
    int b = 0;
    if (v > 0.0) b = static_cast<int>(std::floor((std::log10(v) - llo) / (lhi - llo) * bins));
    ++h.counts[std::clamp(b, 0, bins - 1)];
  }
  return h;
}

namespace {

double interp(const Vector& t, const Vector& v, double x) {
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return v.front();
  if (it == t.end()) return v.back();
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * v[i - 1] + w * v[i];
}

} // namespace

double max_series_deviation(const Vector& ta, const Vector& a, const Vector& tb, const Vector& b,
                            int samples) {
  if (ta.size() != a.size() || tb.size() != b.size() || ta.empty() || tb.empty())
    throw InvalidArgument("series lengths disagree or are empty");
  if (samples < 2) throw InvalidArgument("need at least two samples");
  const double t0 = std::max(ta.front(), tb.front()), t1 = std::min(ta.back(), tb.back());
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = t0 + (t1 - t0) * k / (samples - 1);
    worst = std::max(worst, std::abs(interp(ta, a, t) - interp(tb, b, t)));
  }
  return worst;
}

} // namespace tfm
