#ifndef MPFC_ENERGY_HPP
#define MPFC_ENERGY_HPP

#include <cmath>
#include <limits>

#include "mpfc/elliptic.hpp"
#include "mpfc/grid.hpp"
#include "mpfc/model.hpp"

namespace mpfc {

/// Convex/concave split of the discrete free energy, F = Fc - Fe.
struct EnergySplit {
  double fc = 0.0;
  double fe = 0.0;
  double f = 0.0;
};

struct EnergyReport {
  double f = 0.0;        // F (includes the pin energy when a pin is active)
  double fc = 0.0;       // convex part
  double fe = 0.0;       // concave part
  double pseudo = 0.0;   // F + (1/2M) ||psi||_{-1}^2
  double modified = 0.0; // pseudo + 1/2 ||grad(phi - phi_prev)||_2^2
  double mass = 0.0;     // h^2 <phi||1>
  double psi_mean = 0.0; // h^2 <psi||1>
};

namespace detail {

inline double field_integral(const CellField& f) {
  const int m = f.m(), n = f.n();
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double* fr = f.row(j);
    double row = 0.0;
    for (int i = 1; i <= m; ++i) row += fr[i];
    total += row;
  }
  return f.h() * f.h() * total;
}

// psi arrives from time stepping with a mean that is zero only up to the
// algebraic solver residual, well above inv_laplacian's 1e-12 gate.  Accept
// and subtract a mean up to 1e-6 * max(rms, 1); anything larger is a bug in
// the caller, not roundoff.
inline CellField project_mean_zero(const CellField& f) {
  const GridSpec& g = f.spec();
  const double mu = mean(f);
  const double rms = norm2(f) / std::sqrt(g.area());
  if (std::abs(mu) > 1e-6 * std::max(rms, 1.0))
    throw NonZeroMean("expected a mean-zero field, got mean " +
                      std::to_string(mu));
  CellField out(g);
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* fr = f.row(j);
    double* orow = out.row(j);
    for (int i = 0; i <= g.m + 1; ++i) orow[i] = fr[i] - mu;
  }
  return out;
}

}  // namespace detail

/// F_c = 1/4 ||phi||_4^4 + alpha/2 ||phi||_2^2 + 1/2 ||lap phi||_2^2,
/// F_e = ||grad phi||_2^2.  An active pin adds its (convex) energy to F_c.
/// Ghosts of phi must be filled.
inline EnergySplit energy_split(const CellField& phi, const Params& params,
                                const PinningSpec& pin = {}) {
  EnergySplit e;
  const double n4 = norm4(phi);
  const double n2 = norm2(phi);
  const CellField lap = laplacian(phi);
  const double nl = norm2(lap);
  const double ng = grad_norm2(phi);
  e.fc = 0.25 * n4 * n4 * n4 * n4 + 0.5 * params.alpha() * n2 * n2 +
         0.5 * nl * nl + pin_energy(phi, pin);
  e.fe = ng * ng;
  e.f = e.fc - e.fe;
  return e;
}

/// F(phi) + (1/2M) ||psi||_{-1}^2.
inline double pseudo_energy(const CellField& phi, const CellField& psi,
                            const Params& params,
                            const EllipticConfig& ecfg = {},
                            const PinningSpec& pin = {}) {
  const double f = energy_split(phi, params, pin).f;
  if (norm2(psi) == 0.0) return f;
  const double hn = hminus_norm(detail::project_mean_zero(psi), ecfg);
  return f + hn * hn / (2.0 * params.M);
}

/// pseudo + 1/2 ||grad(phi - phi_prev)||_2^2, the quantity dissipated by
/// the second-order scheme.
inline double modified_pseudo_energy(const CellField& phi,
                                     const CellField& phi_prev,
                                     const CellField& psi,
                                     const Params& params,
                                     const EllipticConfig& ecfg = {},
                                     const PinningSpec& pin = {}) {
  if (!phi.same_grid(phi_prev))
    throw GridMismatch("modified_pseudo_energy: phi_prev grid differs");
  const GridSpec& g = phi.spec();
  CellField diff(g);
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* a = phi.row(j);
    const double* b = phi_prev.row(j);
    double* d = diff.row(j);
    for (int i = 0; i <= g.m + 1; ++i) d[i] = a[i] - b[i];
  }
  const double gn = grad_norm2(diff);
  return pseudo_energy(phi, psi, params, ecfg, pin) + 0.5 * gn * gn;
}

/// |LHS - RHS| of the exact per-step dissipation identity of the
/// second-order scheme,
///   Emod^{k+1} + s (beta/M) ||psi^{k+1/2}||_{-1}^2
///              + (s^4/2) ||grad(D2_s phi^k)||_2^2 = Emod^k,
/// with D2_s phi^k = (phi^{k+1} - 2 phi^k + phi^{k-1}) / s^2.  Zero for
/// exact algebra; scales with the multigrid stopping residual otherwise.
inline double dissipation_residual(const SchemeState& prev,
                                   const SchemeState& next,
                                   const Params& params,
                                   const EllipticConfig& ecfg = {},
                                   const PinningSpec& pin = {}) {
  if (next.k != prev.k + 1)
    throw GridMismatch("dissipation_residual: states are not consecutive");
  const GridSpec& g = prev.phi.spec();
  const double s = params.s;

  CellField psi_half(g);
  CellField d2(g);
  const double inv_s2 = 1.0 / (s * s);
  for (int j = 0; j <= g.n + 1; ++j) {
    const double* pn = next.psi.row(j);
    const double* pp = prev.psi.row(j);
    const double* fn = next.phi.row(j);
    const double* fc = prev.phi.row(j);
    const double* fp = prev.phi_prev.row(j);
    double* ph = psi_half.row(j);
    double* dd = d2.row(j);
    for (int i = 0; i <= g.m + 1; ++i) {
      ph[i] = 0.5 * (pn[i] + pp[i]);
      dd[i] = (fn[i] - 2.0 * fc[i] + fp[i]) * inv_s2;
    }
  }

  double kinetic = 0.0;
  if (norm2(psi_half) > 0.0) {
    const double hn = hminus_norm(detail::project_mean_zero(psi_half), ecfg);
    kinetic = s * (params.beta / params.M) * hn * hn;
  }
  const double gn = grad_norm2(d2);
  const double wave = 0.5 * s * s * s * s * gn * gn;

  const double lhs = modified_pseudo_energy(next.phi, next.phi_prev, next.psi,
                                            params, ecfg, pin) +
                     kinetic + wave;
  const double rhs = modified_pseudo_energy(prev.phi, prev.phi_prev, prev.psi,
                                            params, ecfg, pin);
  return std::abs(lhs - rhs);
}

/// Full per-step energy row.  with_hminus = false skips the elliptic solve
/// behind the -1 norm; pseudo and modified are then NaN.
inline EnergyReport make_energy_report(const SchemeState& st,
                                       const Params& params,
                                       const EllipticConfig& ecfg = {},
                                       const PinningSpec& pin = {},
                                       bool with_hminus = true) {
  EnergyReport r;
  const EnergySplit e = energy_split(st.phi, params, pin);
  r.f = e.f;
  r.fc = e.fc;
  r.fe = e.fe;
  r.mass = detail::field_integral(st.phi);
  r.psi_mean = detail::field_integral(st.psi);
  if (with_hminus) {
    r.pseudo = pseudo_energy(st.phi, st.psi, params, ecfg, pin);
    r.modified = modified_pseudo_energy(st.phi, st.phi_prev, st.psi, params,
                                        ecfg, pin);
  } else {
    r.pseudo = std::numeric_limits<double>::quiet_NaN();
    r.modified = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace mpfc

#endif  // MPFC_ENERGY_HPP
