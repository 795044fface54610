#ifndef MPFC_MODEL_HPP
#define MPFC_MODEL_HPP

#include "mpfc/errors.hpp"
#include "mpfc/grid.hpp"

namespace mpfc {

/// Physical and time-stepping constants.  alpha = 1 - epsilon is derived,
/// never stored, so the relation holds exactly by construction.
struct Params {
  double M = 1.0;          // mobility, > 0
  double epsilon = 0.025;  // undercooling, <= 1
  double beta = 0.9;       // damping, >= 0 (> 0 for damped-wave runs)
  double s = 0.1;          // time step, > 0

  double alpha() const { return 1.0 - epsilon; }

  void validate() const {
    if (!(M > 0.0)) throw ConfigError("params: M must be positive");
    if (!(epsilon <= 1.0)) throw ConfigError("params: epsilon must be <= 1");
    if (!(beta >= 0.0)) throw ConfigError("params: beta must be >= 0");
    if (!(s > 0.0)) throw ConfigError("params: time step s must be positive");
  }
};

enum class SchemeTag { FirstOrder, SecondOrder };
enum class Linearization { Picard, Newton };

/// Quadratic density penalty weight * (phi - target)^2 clamping the field
/// toward a prescribed configuration wherever weight > 0.
struct PinningSpec {
  bool active = false;
  CellField weight;  // >= 0 everywhere
  CellField target;

  void validate(const GridSpec& g) const {
    if (!active) return;
    if (!(weight.spec() == g) || !(target.spec() == g))
      throw GridMismatch("pinning fields are not on the run grid");
    for (int j = 1; j <= g.n; ++j)
      for (int i = 1; i <= g.m; ++i)
        if (weight(i, j) < 0.0)
          throw ConfigError("pinning weight must be nonnegative");
  }
};

/// h^2 sum of weight * (phi - target)^2; the energy added by the pin.
inline double pin_energy(const CellField& phi, const PinningSpec& pin) {
  if (!pin.active) return 0.0;
  const int m = phi.m(), n = phi.n();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* p = phi.row(j);
    const double* w = pin.weight.row(j);
    const double* t = pin.target.row(j);
    double row = 0.0;
    for (int i = 1; i <= m; ++i) {
      const double d = p[i] - t[i];
      row += w[i] * d * d;
    }
    total += row;
  }
  return phi.h() * phi.h() * total;
}

/// Rolling state of either integrator.  phi_prev mirrors phi at k = 0
/// (the phi^{-1} = phi^0 start-up convention) and is advanced by both
/// schemes so two-step diagnostics stay available.
struct SchemeState {
  CellField phi;
  CellField phi_prev;
  CellField psi;
  long k = 0;
  double t = 0.0;
};

/// Builds the k = 0 state: psi = 0 and phi_prev = phi.
inline SchemeState initial_state(CellField phi0) {
  fill_ghosts(phi0);
  SchemeState st;
  st.phi_prev = phi0;
  st.psi = CellField(phi0.spec(), 0.0);
  st.phi = std::move(phi0);
  st.k = 0;
  st.t = 0.0;
  return st;
}

}  // namespace mpfc

#endif  // MPFC_MODEL_HPP
