#include "muskat/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace muskat {

namespace {

// 0 ln 0 := 0; values this small contribute nothing representable anyway
constexpr double kEntropyFloor = 1e-300;

double xlogx(double v) { return v > kEntropyFloor ? v * std::log(v) : 0.0; }

// centered differences, one-sided at the domain edges
std::vector<double> derivative(const GridDensity& u) {
    const std::size_t n = u.grid.n_cells;
    const double dx = u.grid.dx;
    std::vector<double> d(n);
    d[0] = (u.values[1] - u.values[0]) / dx;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u.values[i + 1] - u.values[i - 1]) / (2.0 * dx);
    d[n - 1] = (u.values[n - 1] - u.values[n - 2]) / dx;
    return d;
}

void require_same_grid(const PairState& s) {
    if (s.g && !(s.g->grid == s.f.grid))
        throw NonAdmissible("pair components must share a grid");
}

// Piecewise-linear density through the particle positions: value at X_i is
// the centered two-gap estimate.
std::vector<double> pl_density_values_of(const std::vector<double>& X) {
    const std::size_t n = X.size();
    const double w = 1.0 / static_cast<double>(n);
    std::vector<double> v(n);
    v[0] = w / (X[1] - X[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = 2.0 * w / (X[i + 1] - X[i - 1]);
    v[n - 1] = w / (X[n - 1] - X[n - 2]);
    return v;
}

std::vector<double> pl_density_values(const QuantileState& q) {
    return pl_density_values_of(q.positions);
}

// ∫ φ' ψ' for two piecewise-linear functions supported on their node ranges,
// by a merge sweep over both partitions (exact).
double pl_grad_inner(const std::vector<double>& xa, const std::vector<double>& va,
                     const std::vector<double>& xb, const std::vector<double>& vb) {
    const double lo = std::max(xa.front(), xb.front());
    const double hi = std::min(xa.back(), xb.back());
    if (hi <= lo) return 0.0;
    std::size_t ia = 0, ib = 0;
    while (xa[ia + 1] <= lo) ++ia;
    while (xb[ib + 1] <= lo) ++ib;
    double x = lo, acc = 0.0;
    while (x < hi) {
        const double next = std::min({xa[ia + 1], xb[ib + 1], hi});
        const double sa = (va[ia + 1] - va[ia]) / (xa[ia + 1] - xa[ia]);
        const double sb = (vb[ib + 1] - vb[ib]) / (xb[ib + 1] - xb[ib]);
        acc += sa * sb * (next - x);
        x = next;
        if (x >= hi) break;
        if (xa[ia + 1] <= x && ia + 2 < xa.size()) ++ia;
        if (xb[ib + 1] <= x && ib + 2 < xb.size()) ++ib;
    }
    return acc;
}

double pl_grad_norm2(const std::vector<double>& x, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double s = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
        acc += s * s * (x[i + 1] - x[i]);
    }
    return acc;
}

} // namespace

PhysParams::PhysParams(double r, double r_mu) : R(r), R_mu(r_mu) {
    if (!(R > 0.0) || !(R_mu > 0.0)) throw NonAdmissible("R and R_mu must be positive");
}

SchemeCoefficients SchemeCoefficients::standard(const PhysParams& p) {
    return {1.0 + p.R, p.R, p.R, 1.0, p.R / p.R_mu};
}

SchemeCoefficients SchemeCoefficients::rescaled(const PhysParams& p, double mass_f, double mass_g) {
    if (!(mass_f > 0.0) || !(mass_g > 0.0)) throw ZeroMass("rescaling needs positive masses");
    const double eta2 = mass_f / mass_g;
    return {(1.0 + p.R) * eta2, p.R / eta2, p.R, 1.0 / mass_g, p.R / (p.R_mu * mass_f)};
}

double energy(const PairState& s, const SchemeCoefficients& c) {
    require_same_grid(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.f.values.size(); ++i) {
        const double fv = s.f.values[i];
        const double gv = s.g ? s.g->values[i] : 0.0;
        acc += c.c_ff * fv * fv + c.c_gg * gv * gv + 2.0 * c.c_fg * fv * gv;
    }
    return 0.5 * acc * s.f.grid.dx;
}

double energy(const PairState& s) { return energy(s, SchemeCoefficients::standard(s.params)); }

double entropy_single(const GridDensity& h) {
    double acc = 0.0;
    for (double v : h.values) acc += xlogx(v);
    return acc * h.grid.dx;
}

double abs_entropy(const GridDensity& h) {
    double acc = 0.0;
    for (double v : h.values) acc += std::abs(xlogx(v));
    return acc * h.grid.dx;
}

double entropy_pair(const PairState& s) {
    require_same_grid(s);
    double acc = entropy_single(s.f);
    if (s.g) acc += s.params.R / s.params.R_mu * entropy_single(*s.g);
    return acc;
}

double energy_dissipation_rate(const PairState& s) {
    require_same_grid(s);
    const double R = s.params.R, R_mu = s.params.R_mu;
    const auto df = derivative(s.f);
    std::vector<double> dg;
    if (s.g) dg = derivative(*s.g);
    double acc = 0.0;
    for (std::size_t i = 0; i < df.size(); ++i) {
        const double gvi = s.g ? s.g->values[i] : 0.0;
        const double dgi = s.g ? dg[i] : 0.0;
        const double pf = (1.0 + R) * df[i] + R * dgi;
        const double pg = df[i] + dgi;
        acc += s.f.values[i] * pf * pf + R * R_mu * gvi * pg * pg;
    }
    return acc * s.f.grid.dx;
}

double entropy_dissipation_rate(const PairState& s) {
    require_same_grid(s);
    const double R = s.params.R;
    const auto df = derivative(s.f);
    std::vector<double> dg;
    if (s.g) dg = derivative(*s.g);
    double acc = 0.0;
    for (std::size_t i = 0; i < df.size(); ++i) {
        const double dgi = s.g ? dg[i] : 0.0;
        const double dsum = df[i] + dgi;
        acc += df[i] * df[i] + R * dsum * dsum;
    }
    return acc * s.f.grid.dx;
}

double l2_squared(const QuantileState& q) {
    const std::size_t n = q.size();
    const auto& X = q.positions;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += 1.0 / (X[i + 1] - X[i]);
    return acc / (static_cast<double>(n) * static_cast<double>(n));
}

namespace {

// density of the gap reconstruction at x, ties broken toward the left gap
double pc_eval(const std::vector<double>& pos, double x) {
    auto it = std::lower_bound(pos.begin(), pos.end(), x);
    const std::size_t idx = static_cast<std::size_t>(it - pos.begin());
    if (idx == 0 || idx == pos.size()) return 0.0;
    const double w = 1.0 / static_cast<double>(pos.size());
    return w / (pos[idx] - pos[idx - 1]);
}

// One orientation ∫ p_pc(x) q_pl(x) dx with exact gradients; contributions
// scaled by `scale` are accumulated into value / gP / gQ (gradients optional).
void cross_pc_pl(const std::vector<double>& P, const std::vector<double>& Q, double scale,
                 double& value, std::vector<double>* gP, std::vector<double>* gQ) {
    const std::size_t np = P.size(), m = Q.size();
    const double wp = 1.0 / static_cast<double>(np);

    const std::vector<double> v = pl_density_values_of(Q);

    // prefix mass and first moment of the gap reconstruction at the P nodes
    std::vector<double> mass0(np, 0.0), mom1(np, 0.0);
    for (std::size_t i = 0; i + 1 < np; ++i) {
        mass0[i + 1] = mass0[i] + wp;
        mom1[i + 1] = mom1[i] + wp / (P[i + 1] - P[i]) * 0.5 * (P[i + 1] * P[i + 1] - P[i] * P[i]);
    }
    auto gap_of = [&](double x) {
        auto it = std::upper_bound(P.begin(), P.end(), x);
        return static_cast<std::size_t>(it - P.begin()) - 1;
    };
    auto mass_at = [&](double x) {
        if (x <= P.front()) return 0.0;
        if (x >= P.back()) return mass0.back();
        const std::size_t k = gap_of(x);
        return mass0[k] + wp * (x - P[k]) / (P[k + 1] - P[k]);
    };
    auto mom_at = [&](double x) {
        if (x <= P.front()) return 0.0;
        if (x >= P.back()) return mom1.back();
        const std::size_t k = gap_of(x);
        return mom1[k] + wp / (P[k + 1] - P[k]) * 0.5 * (x * x - P[k] * P[k]);
    };

    // value, piecewise-linear-segment loop: on [Q_m, Q_{m+1}] the interpolant
    // is v_m + s(x - Q_m), so each segment needs only the mass and first
    // moment of the pc density there
    std::vector<double> alpha(m - 1), beta(m - 1);
    for (std::size_t s = 0; s + 1 < m; ++s) {
        const double h = Q[s + 1] - Q[s];
        const double a = mass_at(Q[s + 1]) - mass_at(Q[s]);
        const double b = (mom_at(Q[s + 1]) - mom_at(Q[s])) - Q[s] * a;
        beta[s] = b / h;
        alpha[s] = a - beta[s];
        value += scale * (alpha[s] * v[s] + beta[s] * v[s + 1]);
    }
    if (!gQ && !gP) return;

    if (gQ) {
        auto& G = *gQ;
        // geometry terms of each segment
        for (std::size_t s = 0; s + 1 < m; ++s) {
            const double h = Q[s + 1] - Q[s];
            const double a = alpha[s] + beta[s];
            G[s] += scale * (v[s] * (-pc_eval(P, Q[s]) + (a - beta[s]) / h) +
                             v[s + 1] * (beta[s] - a) / h);
            G[s + 1] += scale * (v[s] * beta[s] / h +
                                 v[s + 1] * (pc_eval(P, Q[s + 1]) - beta[s] / h));
        }
        // node-value terms: coefficient of v_s in the value
        const double wq = 1.0 / static_cast<double>(m);
        for (std::size_t s = 0; s < m; ++s) {
            const double c = (s + 1 < m ? alpha[s] : 0.0) + (s > 0 ? beta[s - 1] : 0.0);
            if (s == 0) {
                const double h = Q[1] - Q[0];
                G[0] += scale * c * wq / (h * h);
                G[1] -= scale * c * wq / (h * h);
            } else if (s + 1 == m) {
                const double h = Q[m - 1] - Q[m - 2];
                G[m - 2] += scale * c * wq / (h * h);
                G[m - 1] -= scale * c * wq / (h * h);
            } else {
                const double d = Q[s + 1] - Q[s - 1];
                G[s - 1] += scale * c * 2.0 * wq / (d * d);
                G[s + 1] -= scale * c * 2.0 * wq / (d * d);
            }
        }
    }

    if (gP) {
        // prefix integral of the interpolant, then the pc-side gradient
        std::vector<double> gc(m, 0.0);
        for (std::size_t s = 0; s + 1 < m; ++s)
            gc[s + 1] = gc[s] + 0.5 * (v[s] + v[s + 1]) * (Q[s + 1] - Q[s]);
        auto pl_prefix = [&](double x) {
            if (x <= Q.front()) return 0.0;
            if (x >= Q.back()) return gc.back();
            auto it = std::upper_bound(Q.begin(), Q.end(), x);
            const std::size_t s = static_cast<std::size_t>(it - Q.begin()) - 1;
            const double h = Q[s + 1] - Q[s];
            const double u = x - Q[s];
            return gc[s] + v[s] * u + 0.5 * (v[s + 1] - v[s]) / h * u * u;
        };
        auto pl_at = [&](double x) {
            if (x <= Q.front() || x >= Q.back()) return 0.0;
            auto it = std::upper_bound(Q.begin(), Q.end(), x);
            const std::size_t s = static_cast<std::size_t>(it - Q.begin()) - 1;
            return v[s] + (v[s + 1] - v[s]) * (x - Q[s]) / (Q[s + 1] - Q[s]);
        };
        auto& G = *gP;
        for (std::size_t k = 0; k < np; ++k) {
            double d = 0.0;
            double f_left = 0.0, f_right = 0.0;
            if (k > 0) {
                const double gap = P[k] - P[k - 1];
                f_left = wp / gap;
                d -= f_left / gap * (pl_prefix(P[k]) - pl_prefix(P[k - 1]));
            }
            if (k + 1 < np) {
                const double gap = P[k + 1] - P[k];
                f_right = wp / gap;
                d += f_right / gap * (pl_prefix(P[k + 1]) - pl_prefix(P[k]));
            }
            d += (f_left - f_right) * pl_at(P[k]);
            G[k] += scale * d;
        }
    }
}

} // namespace

double cross_term(const QuantileState& fq, const QuantileState& gq) {
    double value = 0.0;
    cross_pc_pl(fq.positions, gq.positions, 0.5, value, nullptr, nullptr);
    cross_pc_pl(gq.positions, fq.positions, 0.5, value, nullptr, nullptr);
    return value;
}

CrossTerm cross_term_gradient(const QuantileState& fq, const QuantileState& gq) {
    CrossTerm out;
    out.d_f.assign(fq.size(), 0.0);
    out.d_g.assign(gq.size(), 0.0);
    cross_pc_pl(fq.positions, gq.positions, 0.5, out.value, &out.d_f, &out.d_g);
    cross_pc_pl(gq.positions, fq.positions, 0.5, out.value, &out.d_g, &out.d_f);
    return out;
}

double energy(const QuantilePair& s, const SchemeCoefficients& c) {
    double acc = c.c_ff * l2_squared(s.f);
    if (s.g) {
        acc += c.c_gg * l2_squared(*s.g);
        acc += 2.0 * c.c_fg * cross_term(s.f, *s.g);
    }
    return 0.5 * acc;
}

double energy(const QuantilePair& s) { return energy(s, SchemeCoefficients::standard(s.params)); }

double entropy_single(const QuantileState& q) {
    const std::size_t n = q.size();
    const auto& X = q.positions;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += std::log(static_cast<double>(n) * (X[i + 1] - X[i]));
    return -acc / static_cast<double>(n);
}

double entropy_pair(const QuantilePair& s) {
    double acc = entropy_single(s.f);
    if (s.g) acc += s.params.R / s.params.R_mu * entropy_single(*s.g);
    return acc;
}

double entropy_dissipation_rate(const QuantilePair& s) {
    const double R = s.params.R;
    const auto vf = pl_density_values(s.f);
    const double nf2 = pl_grad_norm2(s.f.positions, vf);
    if (!s.g) return (1.0 + R) * nf2;
    const auto vg = pl_density_values(*s.g);
    const double ng2 = pl_grad_norm2(s.g->positions, vg);
    const double cross = pl_grad_inner(s.f.positions, vf, s.g->positions, vg);
    return (1.0 + R) * nf2 + R * ng2 + 2.0 * R * cross;
}

std::pair<PairState, RescaleInfo> rescale_to_unit_mass(const GridDensity& f_raw,
                                                       const GridDensity& g_raw,
                                                       const PhysParams& params) {
    RescaleInfo info;
    info.mass_f = f_raw.mass();
    info.mass_g = g_raw.mass();
    if (!(info.mass_f > 0.0) || !(info.mass_g > 0.0)) throw ZeroMass("rescaling needs positive masses");
    info.eta2 = info.mass_f / info.mass_g;
    PairState out{f_raw, g_raw, params};
    out.f.normalize();
    out.g->normalize();
    return {std::move(out), info};
}

double entropy_bound_constant() {
    static const double cached = [] {
        // Simpson quadrature of e^{-(1+x²)}(1+x²); the integrand is below
        // 1e-60 outside [-12, 12]
        const double a = -12.0, b = 12.0;
        const std::size_t n = 1 << 16;
        const double h = (b - a) / static_cast<double>(n);
        auto integrand = [](double x) { return std::exp(-(1.0 + x * x)) * (1.0 + x * x); };
        double acc = integrand(a) + integrand(b);
        for (std::size_t i = 1; i < n; ++i)
            acc += integrand(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
        return acc * h / 3.0;
    }();
    return cached;
}

} // namespace muskat
