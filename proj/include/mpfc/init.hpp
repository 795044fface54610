#ifndef MPFC_INIT_HPP
#define MPFC_INIT_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mpfc/errors.hpp"
#include "mpfc/grid.hpp"
#include "mpfc/model.hpp"

namespace mpfc {

inline constexpr double kPi = 3.14159265358979323846;

/// Smooth multi-mode density used by the convergence, multigrid, and
/// energy benchmarks.  Defined on (0,32)^2 only.
inline CellField init_benchmark(const GridSpec& spec) {
  if (std::abs(spec.lx() - 32.0) > 1e-9 || std::abs(spec.ly() - 32.0) > 1e-9)
    throw DomainMismatch("benchmark density requires a (0,32)x(0,32) domain");
  CellField f(spec);
  const double c = 2.0 * kPi / 32.0;
  for (int j = 1; j <= spec.n; ++j) {
    const double y = spec.cell_y(j);
    double* row = f.row(j);
    for (int i = 1; i <= spec.m; ++i) {
      const double x = spec.cell_x(i);
      const double t1 = std::cos(c * (x - 12.0)) * std::sin(c * (y - 1.0));
      const double c2x = std::cos(0.5 * c * (x + 10.0));
      const double c2y = std::cos(0.5 * c * (y + 3.0));
      const double s3x = std::sin(4.0 * kPi * x / 32.0);
      const double s3y = std::sin(4.0 * kPi * (y - 6.0) / 32.0);
      row[i] = 0.07 - 0.02 * t1 + 0.02 * c2x * c2x * c2y * c2y -
               0.01 * s3x * s3x * s3y * s3y;
    }
  }
  fill_ghosts(f);
  return f;
}

namespace detail {

// Portable uniform double in [0,1): top 53 bits of a mt19937_64 draw.
// The C++ distributions are not bit-stable across standard libraries,
// the raw engine is.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// phi = mean + eta with eta uniform in [-amp, amp), drawn row by row
/// from a seeded mt19937_64; identical seeds give identical fields on
/// any platform.
inline CellField init_random(const GridSpec& spec, double mean_value = 0.07,
                             double amp = 0.07, std::uint64_t seed = 1) {
  CellField f(spec);
  std::mt19937_64 rng(seed);
  for (int j = 1; j <= spec.n; ++j) {
    double* row = f.row(j);
    for (int i = 1; i <= spec.m; ++i)
      row[i] = mean_value + amp * (2.0 * detail::uniform01(rng) - 1.0);
  }
  fill_ghosts(f);
  return f;
}

/// Constant melt with Gaussian bumps centered on the y = 0 edge, the
/// nucleation seeds for the polycrystal run.  Empty sites draws three
/// x positions from the seeded generator.
inline CellField init_seed_perturbations(const GridSpec& spec,
                                         double mean_value,
                                         std::vector<double> sites,
                                         double bump_amp, double bump_radius,
                                         std::uint64_t seed = 1) {
  if (!(bump_radius > 0.0)) throw ConfigError("seed bump radius must be > 0");
  if (sites.empty()) {
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 3; ++k)
      sites.push_back(detail::uniform01(rng) * spec.lx());
  }
  CellField f(spec, mean_value);
  const double lx = spec.lx();
  const double inv_two_r2 = 1.0 / (2.0 * bump_radius * bump_radius);
  for (int j = 1; j <= spec.n; ++j) {
    const double y = spec.cell_y(j);
    double* row = f.row(j);
    for (int i = 1; i <= spec.m; ++i) {
      const double x = spec.cell_x(i);
      double bump = 0.0;
      for (double xc : sites) {
        double dx = x - xc;
        if (spec.bc_x == Bc::Periodic) {
          dx -= lx * std::round(dx / lx);
        }
        bump += bump_amp * std::exp(-(dx * dx + y * y) * inv_two_r2);
      }
      row[i] = mean_value + bump;
    }
  }
  fill_ghosts(f);
  return f;
}

/// Crystal strip initial data plus its pinning template.
struct CrystalStrip {
  CellField phi;
  PinningSpec pin;
  double amplitude = 0.0;   // single-mode amplitude A
  double y_bottom = 0.0;    // strip extent
  double y_top = 0.0;
};

/// Single-mode hexagonal density phi_s + A [cos(q x) cos(q y / sqrt3)
/// - cos(2 q y / sqrt3) / 2] with q = sqrt(3)/2; lattice period 4 pi/sqrt(3)
/// in x, atom rows every 2 pi in y.
inline double single_mode_density(double x, double y, double phi_s,
                                  double amplitude) {
  const double q = std::sqrt(3.0) / 2.0;
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  return phi_s + amplitude * (std::cos(q * x) * std::cos(q * y * inv_sqrt3) -
                              0.5 * std::cos(2.0 * q * y * inv_sqrt3));
}

/// Builds a solid strip of the single-mode crystal (layers atom rows,
/// vertically centered) in a liquid bath at phi_l, with weight-2 pinning
/// bands of vertical thickness pi at the crystal top and bottom.  The pin
/// target equals the strip density, with the bottom band shifted left by
/// shear_fraction of the 2 pi row spacing.
inline CrystalStrip init_crystal_strip(const GridSpec& spec,
                                       double phi_s = 0.395,
                                       double phi_l = 0.57,
                                       double epsilon = 0.6, int layers = 20,
                                       double pin_weight = 2.0,
                                       double shear_fraction = 0.0) {
  const double radicand = 15.0 * epsilon - 36.0 * phi_s * phi_s;
  if (radicand < 0.0)
    throw ComplexAmplitude("single-mode amplitude: 15 eps - 36 phi_s^2 = " +
                           std::to_string(radicand) + " < 0");
  const double amplitude = 0.8 * phi_s + (4.0 / 15.0) * std::sqrt(radicand);

  const double row_spacing = 2.0 * kPi;
  const double half_height = 0.5 * layers * row_spacing;
  const double y_mid = 0.5 * spec.ly();
  const double y_bot = y_mid - half_height;
  const double y_top = y_mid + half_height;
  if (y_bot < 0.0)
    throw ConfigError("crystal strip of " + std::to_string(layers) +
                      " layers does not fit the domain height");

  CrystalStrip out;
  out.amplitude = amplitude;
  out.y_bottom = y_bot;
  out.y_top = y_top;
  out.phi = CellField(spec);
  out.pin.active = true;
  out.pin.weight = CellField(spec, 0.0);
  out.pin.target = CellField(spec);

  const double shear = shear_fraction * row_spacing;
  for (int j = 1; j <= spec.n; ++j) {
    const double y = spec.cell_y(j);
    const bool solid = (y >= y_bot && y <= y_top);
    const bool bot_band = (y >= y_bot && y <= y_bot + kPi);
    const bool top_band = (y >= y_top - kPi && y <= y_top);
    double* phi_row = out.phi.row(j);
    double* w_row = out.pin.weight.row(j);
    double* t_row = out.pin.target.row(j);
    for (int i = 1; i <= spec.m; ++i) {
      const double x = spec.cell_x(i);
      const double base =
          solid ? single_mode_density(x, y, phi_s, amplitude) : phi_l;
      phi_row[i] = base;
      w_row[i] = (bot_band || top_band) ? pin_weight : 0.0;
      t_row[i] = bot_band
                     ? single_mode_density(x + shear, y, phi_s, amplitude)
                     : base;
    }
  }
  fill_ghosts(out.phi);
  fill_ghosts(out.pin.weight);
  fill_ghosts(out.pin.target);
  return out;
}

/// Weight-w pinning on two horizontal bands centered at ly/4 and 3 ly/4,
/// targeting the given field.  The generic nonzero pin for domains
/// without crystal structure.
inline PinningSpec make_band_pinning(const CellField& target, double weight,
                                     double thickness) {
  const GridSpec& spec = target.spec();
  PinningSpec pin;
  pin.active = true;
  pin.target = target;
  pin.weight = CellField(spec, 0.0);
  const double c1 = 0.25 * spec.ly();
  const double c2 = 0.75 * spec.ly();
  for (int j = 1; j <= spec.n; ++j) {
    const double y = spec.cell_y(j);
    const bool in_band = std::abs(y - c1) <= 0.5 * thickness ||
                         std::abs(y - c2) <= 0.5 * thickness;
    if (!in_band) continue;
    double* row = pin.weight.row(j);
    for (int i = 1; i <= spec.m; ++i) row[i] = weight;
  }
  fill_ghosts(pin.weight);
  return pin;
}

}  // namespace mpfc

#endif  // MPFC_INIT_HPP
