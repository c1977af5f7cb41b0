#include "muskat/fvref.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "muskat/errors.hpp"
#include "muskat/transport.hpp"

namespace muskat {

namespace {

// pressure fields: p_f = (1+R)f + Rg, p_g = f + g (the R_μ factor sits on the flux)
void pressures(const PairState& s, std::vector<double>& pf, std::vector<double>& pg) {
    const std::size_t n = s.f.grid.n_cells;
    const double R = s.params.R;
    pf.resize(n);
    pg.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double fv = s.f.values[i];
        const double gv = s.g ? s.g->values[i] : 0.0;
        pf[i] = (1.0 + R) * fv + R * gv;
        pg[i] = fv + gv;
    }
}

// conservative update u_i += (dt/dx)(F_{i+1/2} - F_{i-1/2}),
// F_{i+1/2} = mobility · (p_{i+1} - p_i)/dx, no-flux ends
void apply_fluxes(std::vector<double>& u, const std::vector<double>& p, double scale,
                  double dt, double dx, bool centered) {
    const std::size_t n = u.size();
    std::vector<double> flux(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dp = p[i + 1] - p[i];
        const double mob = centered ? 0.5 * (u[i] + u[i + 1]) : (dp > 0.0 ? u[i + 1] : u[i]);
        flux[i] = scale * mob * dp / dx;
    }
    const double r = dt / dx;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f_right = (i + 1 < n) ? flux[i] : 0.0;
        const double f_left = (i > 0) ? flux[i - 1] : 0.0;
        out[i] = u[i] + r * (f_right - f_left);
    }
    u.swap(out);
}

// clip roundoff negatives; restore the exact pre-clip mass by rescaling
void clip_negative(std::vector<double>& u) {
    double pre = 0.0, post = 0.0;
    bool clipped = false;
    for (double& v : u) {
        pre += v;
        if (v < 0.0) {
            v = 0.0;
            clipped = true;
        }
        post += v;
    }
    if (clipped && post > 0.0) {
        const double scale = pre / post;
        for (double& v : u) v *= scale;
    }
}

DiagnosticsRecord fv_record(const PairState& s, double t) {
    DiagnosticsRecord rec;
    rec.time = t;
    rec.mass_f = mass(s.f);
    rec.mass_g = s.g ? mass(*s.g) : 0.0;
    rec.energy = energy(s);
    rec.entropy_pair = entropy_pair(s);
    rec.second_moment_f = second_moment(s.f);
    rec.second_moment_g = s.g ? second_moment(*s.g) : 0.0;
    rec.energy_dissipation_rate = energy_dissipation_rate(s);
    rec.entropy_dissipation_rate = entropy_dissipation_rate(s);
    return rec;
}

} // namespace

double fv_max_dt(const PairState& s, const FvConfig& c) {
    const double R = c.phys.R;
    double max_diff = 0.0;
    for (std::size_t i = 0; i < s.f.grid.n_cells; ++i) {
        const double fv = s.f.values[i];
        const double gv = s.g ? s.g->values[i] : 0.0;
        max_diff = std::max(max_diff, (1.0 + R) * fv + R * gv);
        max_diff = std::max(max_diff, c.phys.R_mu * (fv + gv));
    }
    if (max_diff <= 0.0) return c.t_final > 0.0 ? c.t_final : 1.0;
    const double dx = c.grid.dx;
    return c.cfl_safety * dx * dx / (2.0 * max_diff);
}

PairState fv_step(const PairState& s, double dt, const FvConfig& c) {
    if (!(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0))
        throw CflViolation("cfl_safety must lie in (0, 1]");
    if (dt > fv_max_dt(s, c) * (1.0 + 1e-12))
        throw CflViolation("dt exceeds the explicit stability bound");

    std::vector<double> pf, pg;
    pressures(s, pf, pg);

    PairState out = s;
    apply_fluxes(out.f.values, pf, 1.0, dt, c.grid.dx, c.centered_mobility);
    clip_negative(out.f.values);
    if (out.g) {
        apply_fluxes(out.g->values, pg, c.phys.R_mu, dt, c.grid.dx, c.centered_mobility);
        clip_negative(out.g->values);
    }
    return out;
}

Trajectory fv_run(const PairState& initial, const FvConfig& c,
                  const std::vector<double>& snapshot_times) {
    std::vector<double> times = snapshot_times;
    times.push_back(0.0);
    times.push_back(c.t_final);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                times.end());
    if (times.front() < 0.0 || times.back() > c.t_final * (1.0 + 1e-12))
        throw NegativeTime("snapshot times must lie in [0, t_final]");

    Trajectory traj;
    PairState cur = initial;
    double t = 0.0;
    bool leak_warned = false;
    auto emit = [&](double time) {
        Snapshot snap;
        snap.time = time;
        snap.f = cur.f;
        snap.g = cur.g ? *cur.g : GridDensity(c.grid, std::vector<double>(c.grid.n_cells, 0.0));
        DiagnosticsRecord rec = fv_record(cur, time);
        if (!traj.snapshots.empty()) {
            rec.w2_increment_f = wasserstein2(traj.snapshots.back().f, snap.f);
            if (cur.g) rec.w2_increment_g = wasserstein2(traj.snapshots.back().g, snap.g);
        }
        traj.snapshots.push_back(std::move(snap));
        traj.records.push_back(rec);

        const double edge = (cur.f.values.front() + cur.f.values.back() +
                             (cur.g ? cur.g->values.front() + cur.g->values.back() : 0.0)) *
                            c.grid.dx;
        if (edge > 1e-10 && !leak_warned) {
            std::cerr << "fv_run: boundary-adjacent mass " << edge
                      << " exceeds 1e-10; domain may be too narrow\n";
            leak_warned = true;
        }
    };

    for (double target : times) {
        while (t < target - 1e-14) {
            const double dt = std::min(fv_max_dt(cur, c), target - t);
            cur = fv_step(cur, dt, c);
            t += dt;
        }
        t = target;
        emit(target);
    }
    return traj;
}

std::pair<double, double> weak_form_residual(const Trajectory& traj, const TestFunction& xi,
                                             double t, double s, const PhysParams& phys) {
    auto nearest = [&](double time) -> std::size_t {
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            const double d = std::abs(traj.snapshots[i].time - time);
            if (d < dist) {
                dist = d;
                best = i;
            }
        }
        return best;
    };
    std::size_t is = nearest(s), it = nearest(t);
    if (is > it) std::swap(is, it);

    const Grid& grid = traj.snapshots[is].f.grid;
    const double dx = grid.dx;
    const double R = phys.R;

    // ∫ u ∂ₓp ∂ₓξ dx with centered differences of p, one-sided at the ends
    auto spatial = [&](const std::vector<double>& u, const std::vector<double>& p) {
        const std::size_t n = u.size();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dp;
            if (i == 0)
                dp = (p[1] - p[0]) / dx;
            else if (i + 1 == n)
                dp = (p[n - 1] - p[n - 2]) / dx;
            else
                dp = (p[i + 1] - p[i - 1]) / (2.0 * dx);
            acc += u[i] * dp * xi.deriv(grid.center(i)) * dx;
        }
        return acc;
    };
    auto rates = [&](const Snapshot& snap) {
        const std::size_t n = snap.f.values.size();
        std::vector<double> pf(n), pg(n);
        for (std::size_t i = 0; i < n; ++i) {
            pf[i] = (1.0 + R) * snap.f.values[i] + R * snap.g.values[i];
            pg[i] = snap.f.values[i] + snap.g.values[i];
        }
        return std::pair<double, double>{spatial(snap.f.values, pf),
                                         phys.R_mu * spatial(snap.g.values, pg)};
    };

    double int_f = 0.0, int_g = 0.0;
    for (std::size_t i = is; i < it; ++i) {
        const double dt = traj.snapshots[i + 1].time - traj.snapshots[i].time;
        const auto [af, ag] = rates(traj.snapshots[i]);
        const auto [bf, bg] = rates(traj.snapshots[i + 1]);
        int_f += 0.5 * dt * (af + bf);
        int_g += 0.5 * dt * (ag + bg);
    }

    auto pairing = [&](const GridDensity& a, const GridDensity& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
            acc += (b.values[i] - a.values[i]) * xi.value(grid.center(i)) * dx;
        return acc;
    };
    const double res_f = std::abs(pairing(traj.snapshots[is].f, traj.snapshots[it].f) + int_f);
    const double res_g = std::abs(pairing(traj.snapshots[is].g, traj.snapshots[it].g) + int_g);
    return {res_f, res_g};
}

} // namespace muskat
