#pragma once

#include <optional>
#include <vector>

#include "muskat/functionals.hpp"
#include "muskat/grid.hpp"

namespace muskat {

struct MinimizeReport {
    int iterations = 0;
    double grad_norm = 0.0;
    double objective = 0.0;
    int stages = 0;
    bool converged = false;
};

/// Per-snapshot scalar diagnostics.
struct DiagnosticsRecord {
    double time = 0.0;
    double mass_f = 0.0;
    double mass_g = 0.0;
    double energy = 0.0;
    double entropy_pair = 0.0;
    double second_moment_f = 0.0;
    double second_moment_g = 0.0;
    double w2_increment_f = 0.0;
    double w2_increment_g = 0.0;
    double energy_dissipation_rate = 0.0;
    double entropy_dissipation_rate = 0.0;
    double slack = 0.0;
    std::optional<MinimizeReport> solver;
};

struct Snapshot {
    double time = 0.0;
    GridDensity f;
    GridDensity g;  // all-zero when the g channel is inactive
    std::optional<QuantilePair> particles;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRecord> records;
};

} // namespace muskat
