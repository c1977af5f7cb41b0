#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "muskat/diagnostics.hpp"
#include "muskat/test_functions.hpp"

namespace muskat {

/// One cumulative inequality evaluated at a snapshot time:
/// lhs = value-at-T plus dissipation sum, rhs = initial value plus slack.
struct EstimateEntry {
    double time = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

struct TheoremEstimatesReport {
    std::vector<EstimateEntry> entropy_estimate;  // 𝓗(T) + Σ τ·(entropy production) ≤ 𝓗(0) + slack
    std::vector<EstimateEntry> energy_estimate;   // E(T) + ½ Σ τ·(energy dissipation) ≤ E(0) + slack

    bool all_ok() const;
};

/// Evaluates both cumulative dissipation inequalities at every recorded time,
/// using the trajectory's own dissipation-rate and slack columns. The
/// R-dependence sits inside those columns.
TheoremEstimatesReport check_theorem_estimates(const Trajectory& traj);

struct ComparisonReport {
    struct Entry {
        double time_a = 0.0;
        double time_b = 0.0;  // nearest matched time in the second trajectory
        double l1_f = 0.0, l2_f = 0.0, w2_f = 0.0;
        double l1_g = 0.0, l2_g = 0.0, w2_g = 0.0;
    };
    std::vector<Entry> entries;
    double summary_l2 = 0.0;  // time-integrated L² distance, both species
};

/// Distances between two trajectories at matched snapshot times (nearest
/// neighbour, never interpolated), densities projected to a common grid.
ComparisonReport compare_trajectories(const Trajectory& a, const Trajectory& b);

/// Least-squares slope of log(error) against log(resolution).
/// Requires at least 3 points with positive entries.
double estimate_convergence_order(const std::vector<std::pair<double, double>>& errors);

/// max over snapshot pairs (t, s) and dictionary functions ξ of
/// |∫(f(t)-f(s))ξ| / (‖ξ‖_{W²,∞}·√(|t-s| + tau)), including the g channel.
double equicontinuity_surrogate(const Trajectory& traj,
                                const std::vector<TestFunction>& dictionary, double tau);

} // namespace muskat
