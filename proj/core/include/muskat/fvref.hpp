#pragma once

#include <utility>
#include <vector>

#include "muskat/diagnostics.hpp"
#include "muskat/functionals.hpp"
#include "muskat/grid.hpp"
#include "muskat/test_functions.hpp"

namespace muskat {

/// Explicit conservative finite-volume solver for the coupled system
///   ∂ₜf = ∂ₓ[f ∂ₓ((1+R)f + Rg)],  ∂ₜg = R_μ ∂ₓ[g ∂ₓ(f + g)]
/// with no-flux boundaries on the truncated domain.
struct FvConfig {
    Grid grid;
    PhysParams phys;
    double cfl_safety = 0.45;     // fraction of the explicit stability bound, in (0,1]
    double t_final = 1.0;
    bool centered_mobility = false;  // arithmetic-mean mobility instead of upwind

    FvConfig(Grid g, PhysParams p) : grid(g), phys(p) {}
};

/// Largest stable time step for the current state: cfl_safety·dx²/(2·max diffusivity).
double fv_max_dt(const PairState& s, const FvConfig& c);

/// One explicit step. Throws CflViolation if dt exceeds the stability bound.
/// Masses are conserved exactly (telescoping fluxes); negative cells produced
/// by roundoff are clipped with a mass-restoring rescale.
PairState fv_step(const PairState& s, double dt, const FvConfig& c);

/// Integrates to c.t_final with per-step CFL recomputation, recording a
/// snapshot and a DiagnosticsRecord at each requested time (0 and t_final are
/// always included). Warns on stderr if boundary-adjacent mass exceeds 1e-10.
Trajectory fv_run(const PairState& initial, const FvConfig& c,
                  const std::vector<double>& snapshot_times = {});

/// Absolute residuals of the two weak-form identities between snapshot times
/// s and t: |∫ξ(f(t)-f(s)) + ∫ₛᵗ∫ f ∂ₓ((1+R)f+Rg) ∂ₓξ| and the analogous
/// g expression with the R_μ factor. Time integral by trapezoid over the
/// recorded snapshots.
std::pair<double, double> weak_form_residual(const Trajectory& traj, const TestFunction& xi,
                                             double t, double s, const PhysParams& phys);

} // namespace muskat
