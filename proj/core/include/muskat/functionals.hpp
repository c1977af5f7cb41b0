#pragma once

#include <optional>

#include "muskat/grid.hpp"
#include "muskat/transport.hpp"

namespace muskat {

struct PhysParams {
    double R = 1.0;
    double R_mu = 1.0;

    PhysParams() = default;
    PhysParams(double r, double r_mu);
};

/// One (f, g) pair on a grid. An absent g models the decoupled single-species
/// limit (g identically zero).
struct PairState {
    GridDensity f;
    std::optional<GridDensity> g;
    PhysParams params;
};

/// Same pair in Lagrangian (quantile) coordinates.
struct QuantilePair {
    QuantileState f;
    std::optional<QuantileState> g;
    PhysParams params;
};

/// Quadratic-form coefficients of the energy
///   E(f,g) = ∫ [ c_ff f² + c_gg g² + 2 c_fg f g ] / 2 dx
/// plus the transport weights multiplying W₂²/(2τ) in the scheme functional.
/// The defaults encode E = ½∫[f² + R(f+g)²] with weights (1, R/R_mu); the
/// mass-rescaled variant produces a different set.
struct SchemeCoefficients {
    double c_ff, c_gg, c_fg;
    double w_f, w_g;

    static SchemeCoefficients standard(const PhysParams& p);
    /// Coefficients of the rescaled unit-mass system for raw masses
    /// (mass_f, mass_g).
    static SchemeCoefficients rescaled(const PhysParams& p, double mass_f, double mass_g);
};

// --- Eulerian evaluation ---------------------------------------------------

double energy(const PairState& s);
double entropy_pair(const PairState& s);
double entropy_single(const GridDensity& h);
double abs_entropy(const GridDensity& h);
double energy_dissipation_rate(const PairState& s);
double entropy_dissipation_rate(const PairState& s);

double energy(const PairState& s, const SchemeCoefficients& c);

// --- Lagrangian evaluation -------------------------------------------------

/// ∫ h² dx for the gap reconstruction: (1/N²) Σ 1/ΔX_i.
double l2_squared(const QuantileState& q);

/// Symmetrized cross term ½[∫ f_pc g_pl + ∫ g_pc f_pl] dx, pairing each gap
/// reconstruction (pc) with the other species' piecewise-linear interpolant
/// (pl). The pl pairing keeps the value C¹ in the particle positions, which
/// the quasi-Newton step requires; a pc-pc product kinks whenever particles
/// of the two species cross.
double cross_term(const QuantileState& fq, const QuantileState& gq);

struct CrossTerm {
    double value = 0.0;
    std::vector<double> d_f;  // ∂value/∂X_i
    std::vector<double> d_g;  // ∂value/∂Y_j
};

/// Cross term together with its exact position gradients.
CrossTerm cross_term_gradient(const QuantileState& fq, const QuantileState& gq);

double energy(const QuantilePair& s);
double energy(const QuantilePair& s, const SchemeCoefficients& c);

/// ∫ h ln h for the gap reconstruction: -(1/N) Σ ln(N ΔX_i).
double entropy_single(const QuantileState& q);
double entropy_pair(const QuantilePair& s);

/// ∫ |∂ₓf|² + R |∂ₓ(f+g)|² via piecewise-linear densities through the
/// particle positions (exact for the PL interpolants).
double entropy_dissipation_rate(const QuantilePair& s);

struct RescaleInfo {
    double mass_f = 1.0;
    double mass_g = 1.0;
    double eta2 = 1.0;  // mass_f / mass_g
};

/// Normalizes both components to unit mass and reports the scale factors of
/// the rescaled system.
std::pair<PairState, RescaleInfo> rescale_to_unit_mass(const GridDensity& f_raw,
                                                       const GridDensity& g_raw,
                                                       const PhysParams& params);

/// The constant of the entropy lower bound, ∫ e^{-(1+x²)} (1+x²) dx,
/// evaluated once by quadrature and cached.
double entropy_bound_constant();

} // namespace muskat
