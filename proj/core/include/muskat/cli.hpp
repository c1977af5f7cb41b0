#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "muskat/diagnostics.hpp"
#include "muskat/functionals.hpp"
#include "muskat/grid.hpp"
#include "muskat/harness.hpp"
#include "muskat/jko.hpp"

namespace muskat {

/// Initial-data preset like gaussian(0,1), uniform(a,b), bump(center,width),
/// two_bump(c1,w1,c2,w2), or zero.
struct PresetSpec {
    std::string kind = "gaussian";
    std::vector<double> args{0.0, 1.0};
};

PresetSpec parse_preset(const std::string& text);
std::string preset_to_string(const PresetSpec& p);

struct RunConfig {
    std::string mode = "jko";  // jko | fv | compare | sweep | certify
    PhysParams phys{};
    double tau = 0.01;
    std::size_t N = 256;
    double grid_min = -8.0;
    double grid_max = 8.0;
    std::size_t grid_cells = 1024;
    std::size_t fv_cells = 0;  // 0 -> grid_cells
    double t_final = 1.0;
    double cfl_safety = 0.45;
    PresetSpec initial_f{"gaussian", {0.0, 1.0}};
    PresetSpec initial_g{"gaussian", {1.0, 1.0}};
    std::optional<std::pair<double, double>> masses;  // triggers unit-mass rescale
    std::vector<double> sweep_taus{0.04, 0.02, 0.01, 0.005};
    std::string out_dir = "out";
    unsigned seed = 0;  // reserved for randomized test dictionaries
    int jobs = 1;

    Grid grid() const { return Grid::from_bounds(grid_min, grid_max, grid_cells); }
    Grid fv_grid() const {
        return Grid::from_bounds(grid_min, grid_max, fv_cells ? fv_cells : grid_cells);
    }
};

/// Parses a flat key=value document or a JSON document with the same keys.
/// Throws SchemaError listing every violation.
RunConfig parse_config(const std::string& text);

/// Applies a single key=value override (same keys as the config schema).
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Samples a preset on the grid and normalizes to unit mass ("zero" stays
/// zero). Throws PresetOutOfDomain for degenerate or out-of-range parameters.
GridDensity make_initial(const PresetSpec& preset, const Grid& grid);

/// Initial pair from the config presets, after the optional mass rescale.
/// Returns the Eulerian pair, the quantile pair, and the effective scheme
/// coefficients (rescaled when masses are given).
struct InitialData {
    PairState state;
    QuantilePair quantiles;
    SchemeCoefficients coefficients;
    RescaleInfo rescale;
};
InitialData build_initial(const RunConfig& cfg);

JkoParams jko_params(const RunConfig& cfg);

Trajectory run_jko_mode(const RunConfig& cfg);
Trajectory run_fv_mode(const RunConfig& cfg);

struct CertificateResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct RunReport {
    std::vector<CertificateResult> certificates;
    double measured_c1 = 0.0;     // largest cumulative dissipation sum
    double measured_c2 = 0.0;     // equicontinuity surrogate constant
    double measured_c_ell = 0.0;  // entropy lower-bound constant
    RescaleInfo rescale;

    bool all_pass() const;
};

/// Runs the scheme and evaluates every certificate (mass, energy descent,
/// increment bound, second moments, cumulative entropy/energy estimates,
/// Euler-Lagrange residuals, dissipation certificates, flow interchange,
/// entropy lower bounds).
RunReport certify_run(const RunConfig& cfg, Trajectory* out_traj = nullptr);

/// Number formatted with 17 significant digits (bit-stable regression diffs).
std::string format_number(double v);

/// Writes snapshots.csv, diagnostics.csv, and report.json into dir.
void emit_outputs(const Trajectory& traj, const RunReport& report, const RunConfig& cfg,
                  const std::string& dir);

/// Writes comparison.csv into dir.
void emit_comparison(const ComparisonReport& report, const std::string& dir);

} // namespace muskat
