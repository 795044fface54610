#ifndef MPFC_STEP_HPP
#define MPFC_STEP_HPP

#include <string>
#include <utility>

#include "mpfc/elliptic.hpp"
#include "mpfc/energy.hpp"
#include "mpfc/multigrid.hpp"
#include "mpfc/scheme.hpp"

namespace mpfc {

struct StepDiagnostics {
  int vcycles = 0;
  double residual = 0.0;    // accepted residual norm
  double tol_abs = 0.0;     // absolute solver threshold for this step
  double phi_norm2 = 0.0;   // ||phi^{k+1}||_2
  double mu_norm2 = 0.0;    // ||mu||_2 of the solved chemical potential
  EnergyReport energy;
  bool has_energy = false;
};

struct StepOptions {
  bool with_energy = true;   // assemble an EnergyReport after the step
  bool with_hminus = true;   // include the -1 norm terms (one elliptic solve)
};

/// Advances one time step: assemble, solve to tolerance, finalize.
/// NoConvergence is rethrown with the failing step index attached.
inline std::pair<SchemeState, StepDiagnostics> step(
    const SchemeState& st, SchemeTag tag, const Params& params,
    const MgConfig& mg_cfg, const PinningSpec& pin = {},
    const EllipticConfig& ecfg = {}, const StepOptions& opts = {}) {
  NonlinearSystem sys = assemble(tag, st, params, pin);
  SolveResult sol;
  try {
    sol = solve_to_tolerance(sys, mg_cfg);
  } catch (NoConvergence& e) {
    throw NoConvergence("step " + std::to_string(st.k + 1) + ": " + e.what(),
                        e.residual_history, st.k + 1);
  }
  StepDiagnostics diag;
  diag.mu_norm2 = norm2(sol.u.mu);
  SchemeState next = finalize(tag, std::move(sol.u.phi), st, params);
  diag.phi_norm2 = norm2(next.phi);
  diag.vcycles = sol.cycles;
  diag.residual = sol.history.back();
  diag.tol_abs = sol.tol_abs;
  if (opts.with_energy) {
    diag.energy =
        make_energy_report(next, params, ecfg, pin, opts.with_hminus);
    diag.has_energy = true;
  }
  return {std::move(next), diag};
}

}  // namespace mpfc

#endif  // MPFC_STEP_HPP
