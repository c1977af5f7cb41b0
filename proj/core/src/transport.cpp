#include "muskat/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace muskat {

namespace {

constexpr double kMassTol = 1e-10;

void require_unit_mass(const GridDensity& u, double tol = kMassTol) {
    const double m = u.mass();
    if (std::abs(m - 1.0) > tol) throw MassNotUnit(m);
}

// Inverse CDF as piecewise-linear graph over the mass variable: node k is
// (s[k], x[k]) with s nondecreasing. Plateaus of the CDF show up as repeated
// s values (jumps of the inverse).
struct InverseCdf {
    std::vector<double> s;
    std::vector<double> x;

    // Value at a level lying strictly inside an increasing segment; levels at
    // a plateau get the right end of the jump (fine for integration since
    // plateaus carry zero mass in s).
    double operator()(double level) const {
        if (level <= s.front()) return x.front();
        if (level >= s.back()) return x.back();
        auto it = std::upper_bound(s.begin(), s.end(), level);
        const std::size_t k = static_cast<std::size_t>(it - s.begin());
        const double s0 = s[k - 1], s1 = s[k];
        if (s1 == s0) return x[k];
        const double w = (level - s0) / (s1 - s0);
        return x[k - 1] + w * (x[k] - x[k - 1]);
    }
};

InverseCdf inverse_cdf(const GridDensity& u) {
    const auto F = cdf(u);
    InverseCdf inv;
    const double total = F.f.back();
    inv.s.reserve(F.f.size());
    inv.x.reserve(F.x.size());
    for (std::size_t k = 0; k < F.f.size(); ++k) {
        inv.s.push_back(F.f[k] / total);
        inv.x.push_back(F.x[k]);
    }
    return inv;
}

} // namespace

QuantileState::QuantileState(std::vector<double> pos) : positions(std::move(pos)) {
    if (positions.size() < 2) throw Error("quantile state needs at least 2 positions");
    for (std::size_t i = 1; i < positions.size(); ++i)
        if (!(positions[i] > positions[i - 1]))
            throw NonMonotone("quantile positions must be strictly increasing");
}

double QuantileState::second_moment() const {
    double s = 0.0;
    for (double p : positions) s += p * p;
    return s / static_cast<double>(positions.size());
}

double MonotoneMap::operator()(double x) const {
    if (x <= breakpoints.front()) return values.front();
    if (x >= breakpoints.back()) return values.back();
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin());
    const double x0 = breakpoints[k - 1], x1 = breakpoints[k];
    if (x1 == x0) return values[k];
    const double w = (x - x0) / (x1 - x0);
    return values[k - 1] + w * (values[k] - values[k - 1]);
}

double PiecewiseLinearCdf::operator()(double xq) const {
    if (xq <= x.front()) return f.front();
    if (xq >= x.back()) return f.back();
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double w = (xq - x[k - 1]) / (x[k] - x[k - 1]);
    return f[k - 1] + w * (f[k] - f[k - 1]);
}

double PiecewiseLinearCdf::quantile(double level) const {
    const double total = f.back();
    const double target = level * total;
    // node hits are detected within a rounding tolerance: cumulative sums
    // rarely equal a requested level bit-for-bit
    const double eps = 1e-12 * std::max(1.0, std::abs(total));
    if (target <= f.front() + eps) return x.front();
    if (target >= f.back() - eps) return x.back();
    // first node with f > target (beyond rounding)
    auto hi = std::upper_bound(f.begin(), f.end(), target + eps);
    const std::size_t k = static_cast<std::size_t>(hi - f.begin());
    if (f[k - 1] >= target - eps) {
        // level sits on a node value; if the CDF is flat there, take the
        // plateau midpoint
        std::size_t lo = k - 1;
        while (lo > 0 && f[lo - 1] >= target - eps) --lo;
        return 0.5 * (x[lo] + x[k - 1]);
    }
    const double w = (target - f[k - 1]) / (f[k] - f[k - 1]);
    return x[k - 1] + w * (x[k] - x[k - 1]);
}

PiecewiseLinearCdf cdf(const GridDensity& u) {
    PiecewiseLinearCdf F;
    const std::size_t n = u.grid.n_cells;
    F.x.resize(n + 1);
    F.f.resize(n + 1);
    F.f[0] = 0.0;
    for (std::size_t i = 0; i <= n; ++i) F.x[i] = u.grid.edge(i);
    for (std::size_t i = 0; i < n; ++i) F.f[i + 1] = F.f[i] + u.values[i] * u.grid.dx;
    if (!(F.f.back() > 0.0)) throw ZeroMass("cdf of zero-mass density");
    return F;
}

QuantileState quantiles_from_density(const GridDensity& u, std::size_t n, double mass_tolerance) {
    require_unit_mass(u, mass_tolerance);
    if (n < 2) throw Error("need at least 2 quantiles");
    const auto F = cdf(u);
    std::vector<double> pos(n);
    for (std::size_t i = 0; i < n; ++i)
        pos[i] = F.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    // plateau resolution can produce ties; nudge by half an epsilon per index
    const double eps = 0.5 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(F.x.back() - F.x.front()));
    for (std::size_t i = 1; i < n; ++i)
        if (!(pos[i] > pos[i - 1])) pos[i] = pos[i - 1] + eps * static_cast<double>(i);
    return QuantileState(std::move(pos));
}

GridDensity density_from_quantiles(const QuantileState& q, const Grid& grid) {
    const std::size_t n = q.size();
    const auto& X = q.positions;
    const double w = 1.0 / static_cast<double>(n);
    // reconstruction pieces: inter-particle gaps carry mass 1/N each and two
    // half-cells at the ends carry 1/(2N), so total mass is exactly 1
    std::vector<double> edges;
    std::vector<double> vals;
    edges.reserve(n + 2);
    vals.reserve(n + 1);
    edges.push_back(X.front() - 0.5 * (X[1] - X[0]));
    vals.push_back(w / (X[1] - X[0]));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.push_back(X[i]);
        vals.push_back(w / (X[i + 1] - X[i]));
    }
    edges.push_back(X.back());
    vals.push_back(w / (X[n - 1] - X[n - 2]));
    edges.push_back(X.back() + 0.5 * (X[n - 1] - X[n - 2]));

    if (edges.front() < grid.x_min || edges.back() > grid.x_max())
        throw DomainOverflow("quantile positions leave the grid");

    std::vector<double> out(grid.n_cells, 0.0);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], b = edges[p + 1];
        const double v = vals[p];
        auto k0 = static_cast<std::size_t>(std::clamp(
            std::floor((a - grid.x_min) / grid.dx), 0.0, static_cast<double>(grid.n_cells - 1)));
        for (std::size_t k = k0; k < grid.n_cells; ++k) {
            const double ca = grid.edge(k), cb = grid.edge(k + 1);
            if (ca >= b) break;
            const double ov = std::min(b, cb) - std::max(a, ca);
            if (ov > 0.0) out[k] += v * ov / grid.dx;
        }
    }
    return GridDensity(grid, std::move(out));
}

double wasserstein2(const GridDensity& u, const GridDensity& v) {
    require_unit_mass(u);
    require_unit_mass(v);
    const InverseCdf qu = inverse_cdf(u);
    const InverseCdf qv = inverse_cdf(v);
    // merge the mass breakpoints of both inverse CDFs; on each sub-interval
    // both quantile functions are linear, so the squared difference is a
    // quadratic integrated exactly by two-point Gauss-Legendre. The nodes
    // are interior, which keeps the evaluation away from the segment
    // endpoints where a plateau of either CDF makes the inverse ambiguous.
    std::vector<double> s;
    s.reserve(qu.s.size() + qv.s.size());
    s.insert(s.end(), qu.s.begin(), qu.s.end());
    s.insert(s.end(), qv.s.begin(), qv.s.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    const double node_offset = 0.5 / std::sqrt(3.0);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double a = s[k], b = s[k + 1];
        if (!(b > a)) continue;
        const double m = 0.5 * (a + b), h = b - a;
        const double d1 = qu(m - node_offset * h) - qv(m - node_offset * h);
        const double d2 = qu(m + node_offset * h) - qv(m + node_offset * h);
        total += 0.5 * h * (d1 * d1 + d2 * d2);
    }
    return std::sqrt(std::max(total, 0.0));
}

double wasserstein2_quantiles(const QuantileState& x, const QuantileState& y) {
    if (x.size() != y.size()) throw SizeMismatch("quantile states differ in size");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.positions[i] - y.positions[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(x.size()));
}

MonotoneMap monotone_map(const GridDensity& u, const GridDensity& v) {
    require_unit_mass(u);
    require_unit_mass(v);
    const auto Fu = cdf(u);
    const auto Fv = cdf(v);
    const InverseCdf qu = inverse_cdf(u);
    const InverseCdf qv = inverse_cdf(v);
    std::vector<double> s;
    s.reserve(qu.s.size() + qv.s.size());
    s.insert(s.end(), qu.s.begin(), qu.s.end());
    s.insert(s.end(), qv.s.begin(), qv.s.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());

    MonotoneMap t;
    t.breakpoints.reserve(s.size());
    t.values.reserve(s.size());
    for (double level : s) {
        const double xs = Fu.quantile(level);
        const double ys = Fv.quantile(level);
        if (!t.breakpoints.empty() && !(xs > t.breakpoints.back())) continue;
        t.breakpoints.push_back(xs);
        t.values.push_back(ys);
    }
    if (t.breakpoints.size() < 2) throw Error("degenerate monotone map");
    return t;
}

GridDensity pushforward(const GridDensity& u, const MonotoneMap& t) {
    for (std::size_t k = 1; k < t.values.size(); ++k)
        if (t.values[k] < t.values[k - 1]) throw NonMonotoneMap("map values must be nondecreasing");
    const Grid& grid = u.grid;
    std::vector<double> out(grid.n_cells, 0.0);

    auto deposit_mass = [&](double a, double b, double m) {
        // spread mass m uniformly over [a, b] (or drop it in the containing
        // cell when the image degenerates to a point), clamped to the grid
        if (m <= 0.0) return;
        if (b - a < 1e-14 * std::max(1.0, std::abs(a))) {
            const double x = std::clamp(0.5 * (a + b), grid.x_min, grid.x_max());
            auto k = static_cast<std::size_t>(std::clamp(
                std::floor((x - grid.x_min) / grid.dx), 0.0, static_cast<double>(grid.n_cells - 1)));
            out[k] += m / grid.dx;
            return;
        }
        const double lo = std::clamp(a, grid.x_min, grid.x_max());
        const double hi = std::clamp(b, grid.x_min, grid.x_max());
        const double dens = m / (b - a);
        auto k0 = static_cast<std::size_t>(std::clamp(
            std::floor((lo - grid.x_min) / grid.dx), 0.0, static_cast<double>(grid.n_cells - 1)));
        double covered = 0.0;
        for (std::size_t k = k0; k < grid.n_cells; ++k) {
            const double ca = grid.edge(k), cb = grid.edge(k + 1);
            if (ca >= hi) break;
            const double ov = std::min(hi, cb) - std::max(lo, ca);
            if (ov > 0.0) {
                out[k] += dens * ov / grid.dx;
                covered += dens * ov;
            }
        }
        // clamp any mass mapped beyond the grid into the end cells
        const double leak = m - covered;
        if (leak > 0.0) {
            if (a < grid.x_min)
                out.front() += leak / grid.dx;
            else
                out.back() += leak / grid.dx;
        }
    };

    for (std::size_t i = 0; i < u.values.size(); ++i) {
        if (u.values[i] == 0.0) continue;
        const double ca = grid.edge(i), cb = grid.edge(i + 1);
        // split the cell at the map breakpoints so each sub-piece maps linearly
        auto lo_it = std::lower_bound(t.breakpoints.begin(), t.breakpoints.end(), ca);
        double prev = ca;
        for (auto it = lo_it; it != t.breakpoints.end() && *it < cb; ++it) {
            if (*it > prev) {
                deposit_mass(t(prev), t(*it), u.values[i] * (*it - prev));
                prev = *it;
            }
        }
        if (cb > prev) deposit_mass(t(prev), t(cb), u.values[i] * (cb - prev));
    }
    return GridDensity(grid, std::move(out));
}

GridDensity heat_smooth(const GridDensity& u, double t) {
    if (t < 0.0) throw NegativeTime("heat_smooth requires t >= 0");
    if (t == 0.0) return u;
    const double sigma = std::sqrt(2.0 * t);
    const double dx = u.grid.dx;
    const auto half = static_cast<std::size_t>(std::ceil(8.0 * sigma / dx));
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (std::size_t j = 0; j < kernel.size(); ++j) {
        const double r = (static_cast<double>(j) - static_cast<double>(half)) * dx;
        kernel[j] = std::exp(-r * r / (2.0 * sigma * sigma));
        ksum += kernel[j];
    }
    for (double& k : kernel) k /= ksum;
    const std::size_t n = u.grid.n_cells;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (u.values[i] == 0.0) continue;
        const double vi = u.values[i];
        const std::size_t j_lo = half > i ? half - i : 0;
        const std::size_t j_hi = std::min(kernel.size(), n + half - i);
        for (std::size_t j = j_lo; j < j_hi; ++j) out[i + j - half] += vi * kernel[j];
    }
    return GridDensity(u.grid, std::move(out));
}

} // namespace muskat
