#include "muskat/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "muskat/errors.hpp"
#include "muskat/transport.hpp"

namespace muskat {

bool TheoremEstimatesReport::all_ok() const {
    for (const auto& e : entropy_estimate)
        if (!e.ok) return false;
    for (const auto& e : energy_estimate)
        if (!e.ok) return false;
    return true;
}

TheoremEstimatesReport check_theorem_estimates(const Trajectory& traj) {
    TheoremEstimatesReport report;
    if (traj.records.empty()) return report;
    const DiagnosticsRecord& r0 = traj.records.front();
    double entropy_sum = 0.0, energy_sum = 0.0, slack_sum = 0.0;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const DiagnosticsRecord& r = traj.records[k];
        if (k > 0) {
            const double dt = r.time - traj.records[k - 1].time;
            entropy_sum += dt * r.entropy_dissipation_rate;
            energy_sum += 0.5 * dt * r.energy_dissipation_rate;
            slack_sum += r.slack;
        }
        // The dissipation-rate columns are discretizations, so both
        // inequalities get a pinned relative tolerance on top of the
        // accumulated solver slack.
        const double tol_entropy = 1e-4 * (1.0 + std::abs(r0.entropy_pair));
        const double tol_energy = 1e-4 * (1.0 + std::abs(r0.energy));
        EstimateEntry ent{r.time, r.entropy_pair + entropy_sum, r0.entropy_pair + slack_sum,
                          false};
        ent.ok = ent.lhs <= ent.rhs + tol_entropy;
        report.entropy_estimate.push_back(ent);
        EstimateEntry en{r.time, r.energy + energy_sum, r0.energy + slack_sum, false};
        en.ok = en.lhs <= en.rhs + tol_energy;
        report.energy_estimate.push_back(en);
    }
    return report;
}

namespace {

std::size_t nearest_index(const Trajectory& t, double time) {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.snapshots.size(); ++i) {
        const double d = std::abs(t.snapshots[i].time - time);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

} // namespace

ComparisonReport compare_trajectories(const Trajectory& a, const Trajectory& b) {
    if (a.snapshots.empty() || b.snapshots.empty())
        throw NoOverlap("cannot compare empty trajectories");
    const double a_lo = a.snapshots.front().time, a_hi = a.snapshots.back().time;
    const double b_lo = b.snapshots.front().time, b_hi = b.snapshots.back().time;
    if (a_lo > b_hi + 1e-12 || b_lo > a_hi + 1e-12)
        throw NoOverlap("trajectory time ranges do not overlap");

    const Grid ga = a.snapshots.front().f.grid;
    const Grid gb = b.snapshots.front().f.grid;
    const Grid common = (ga.dx <= gb.dx) ? ga : gb;

    ComparisonReport report;
    for (const Snapshot& sa : a.snapshots) {
        if (sa.time < b_lo - 1e-12 || sa.time > b_hi + 1e-12) continue;
        const Snapshot& sb = b.snapshots[nearest_index(b, sa.time)];
        ComparisonReport::Entry e;
        e.time_a = sa.time;
        e.time_b = sb.time;
        const GridDensity fa = (sa.f.grid == common) ? sa.f : project(sa.f, common);
        const GridDensity fb = (sb.f.grid == common) ? sb.f : project(sb.f, common);
        e.l1_f = l1_distance(fa, fb);
        e.l2_f = l2_distance(fa, fb);
        if (std::abs(fa.mass() - 1.0) < 1e-6 && std::abs(fb.mass() - 1.0) < 1e-6)
            e.w2_f = wasserstein2(fa, fb);
        const GridDensity gda = (sa.g.grid == common) ? sa.g : project(sa.g, common);
        const GridDensity gdb = (sb.g.grid == common) ? sb.g : project(sb.g, common);
        e.l1_g = l1_distance(gda, gdb);
        e.l2_g = l2_distance(gda, gdb);
        if (std::abs(gda.mass() - 1.0) < 1e-6 && std::abs(gdb.mass() - 1.0) < 1e-6)
            e.w2_g = wasserstein2(gda, gdb);
        report.entries.push_back(e);
    }
    if (report.entries.empty()) throw NoOverlap("no matched snapshot times");

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < report.entries.size(); ++i) {
        const auto& p = report.entries[i];
        const auto& q = report.entries[i + 1];
        const double dt = q.time_a - p.time_a;
        const double vp = p.l2_f * p.l2_f + p.l2_g * p.l2_g;
        const double vq = q.l2_f * q.l2_f + q.l2_g * q.l2_g;
        acc += 0.5 * dt * (vp + vq);
    }
    report.summary_l2 = std::sqrt(acc);
    return report;
}

double estimate_convergence_order(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 3) throw DegenerateFit("need at least 3 (resolution, error) points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [h, e] : errors) {
        if (!(h > 0.0) || !(e > 0.0))
            throw DegenerateFit("resolutions and errors must be positive");
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(errors.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-14) throw DegenerateFit("resolutions are not distinct");
    return (n * sxy - sx * sy) / denom;
}

double equicontinuity_surrogate(const Trajectory& traj,
                                const std::vector<TestFunction>& dictionary, double tau) {
    if (traj.snapshots.size() < 2) return 0.0;
    const std::size_t S = traj.snapshots.size();
    const std::size_t D = dictionary.size();
    // per-snapshot pairings, so the pair loop is O(S² D)
    std::vector<std::vector<double>> pf(S, std::vector<double>(D));
    std::vector<std::vector<double>> pg(S, std::vector<double>(D));
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < D; ++j) {
            pf[i][j] = traj.snapshots[i].f.integrate(dictionary[j].value);
            pg[i][j] = traj.snapshots[i].g.integrate(dictionary[j].value);
        }
    double measured = 0.0;
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t t = s + 1; t < S; ++t) {
            const double dt = traj.snapshots[t].time - traj.snapshots[s].time;
            const double denom_t = std::sqrt(std::abs(dt) + tau);
            for (std::size_t j = 0; j < D; ++j) {
                const double norm = dictionary[j].w2inf_norm() * denom_t;
                measured = std::max(measured, std::abs(pf[t][j] - pf[s][j]) / norm);
                measured = std::max(measured, std::abs(pg[t][j] - pg[s][j]) / norm);
            }
        }
    return measured;
}

} // namespace muskat
