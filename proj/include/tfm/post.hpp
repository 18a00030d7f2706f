#pragma once

#include "tfm/fem.hpp"
#include "tfm/physics.hpp"
#include "tfm/state.hpp"

#include <vector>

namespace tfm {

/// Domain average of a P1 phase fraction.
double gas_holdup(const FeField& alpha_g);

struct SlipStats {
  double slip_mps = 0.0;
  double bubble_reynolds = 0.0;
  std::size_t nodes = 0;
  bool empty = true;
};

/// Mean dimensional slip |v_g - v_l| and bubble Reynolds number over the
/// mesh vertices where alpha_g >= alpha_floor.
SlipStats slip_and_reynolds(const State& state, const FluidProperties& props, const Scales& scales,
                            double alpha_floor = 0.005);

/// Row-major samples: values[j * nx + i] at origin + ((i + 1/2) dx, (j + 1/2) dy).
struct UniformGridSample {
  int nx = 0;
  int ny = 0;
  Vec2 origin;
  Vec2 spacing;
  Vector values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

/// Cell-centred samples of a scalar field over the whole domain.
UniformGridSample sample_to_grid(const FeField& field, int nx, int ny);

/// |DFT of the mean-removed grid|^2 / (nx ny), same layout as the grid.
struct PowerSpectrum {
  int nx = 0;
  int ny = 0;
  Vector power;

  double at(int i, int j) const { return power[static_cast<std::size_t>(j) * nx + i]; }
};

PowerSpectrum power_spectrum_2d(const UniformGridSample& grid);

/// Mean power per integer radius of the wrapped wavenumber; only bins that
/// received at least one value are listed.
struct RadialSpectrum {
  std::vector<int> k;
  Vector power;
  std::vector<int> count;
};

RadialSpectrum radial_average(const PowerSpectrum& psd);

/// Log-spaced histogram. edges has bins + 1 entries; empty when nothing is
/// retained.
struct Histogram {
  Vector edges;
  std::vector<std::size_t> counts;
};

/// Histogram of PSD values above `floor`. With floor = 0 every value is kept
/// and exact zeros land in the first bin.
Histogram psd_histogram(const PowerSpectrum& psd, int bins, double floor = 1e-30);

/// Largest |a(t) - b(t)| over the common time range, with both series
/// linearly interpolated at `samples` uniform times. Times must increase.
double max_series_deviation(const Vector& ta, const Vector& a, const Vector& tb, const Vector& b,
                            int samples = 1000);

} // namespace tfm
