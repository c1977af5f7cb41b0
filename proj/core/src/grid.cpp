#include "muskat/grid.hpp"

#include <algorithm>
#include <cmath>

namespace muskat {

Grid::Grid(double x_min_, double dx_, std::size_t n_cells_)
    : x_min(x_min_), dx(dx_), n_cells(n_cells_) {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw Error("grid dx must be positive and finite");
    if (n_cells < 2) throw Error("grid needs at least 2 cells");
    if (!std::isfinite(x_min) || !std::isfinite(x_max())) throw Error("grid domain must be finite");
}

Grid Grid::from_bounds(double x_min, double x_max, std::size_t n_cells) {
    if (!(x_max > x_min)) throw Error("grid x_max must exceed x_min");
    if (n_cells < 2) throw Error("grid needs at least 2 cells");
    return Grid(x_min, (x_max - x_min) / static_cast<double>(n_cells), n_cells);
}

GridDensity::GridDensity(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n_cells) throw SizeMismatch("density values do not match grid cell count");
    for (double val : values)
        if (!(val >= 0.0) || !std::isfinite(val)) throw NonAdmissible("density values must be nonnegative and finite");
}

double GridDensity::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.dx;
}

double GridDensity::second_moment() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = grid.center(i);
        s += values[i] * x * x;
    }
    return s * grid.dx;
}

void GridDensity::normalize() {
    const double m = mass();
    if (!(m > 0.0)) throw ZeroMass("cannot normalize zero-mass density");
    for (double& v : values) v /= m;
}

double mass(const GridDensity& u) { return u.mass(); }
double second_moment(const GridDensity& u) { return u.second_moment(); }

double l1_distance(const GridDensity& u, const GridDensity& v) {
    if (!(u.grid == v.grid)) throw SizeMismatch("l1_distance requires identical grids");
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) s += std::abs(u.values[i] - v.values[i]);
    return s * u.grid.dx;
}

double l2_distance(const GridDensity& u, const GridDensity& v) {
    if (!(u.grid == v.grid)) throw SizeMismatch("l2_distance requires identical grids");
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double d = u.values[i] - v.values[i];
        s += d * d;
    }
    return std::sqrt(s * u.grid.dx);
}

GridDensity project(const GridDensity& u, const Grid& target) {
    std::vector<double> out(target.n_cells, 0.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        if (u.values[i] == 0.0) continue;
        const double a = u.grid.edge(i);
        const double b = u.grid.edge(i + 1);
        // overlap of [a,b) with target cells
        const double lo = std::max(a, target.x_min);
        const double hi = std::min(b, target.x_max());
        if (hi <= lo) continue;
        auto cell_of = [&](double x) {
            auto k = static_cast<long>(std::floor((x - target.x_min) / target.dx));
            k = std::clamp(k, 0L, static_cast<long>(target.n_cells) - 1L);
            return static_cast<std::size_t>(k);
        };
        for (std::size_t k = cell_of(lo); k < target.n_cells; ++k) {
            const double ca = target.edge(k);
            const double cb = target.edge(k + 1);
            if (ca >= hi) break;
            const double ov = std::min(hi, cb) - std::max(lo, ca);
            if (ov > 0.0) out[k] += u.values[i] * ov / target.dx;
        }
    }
    return GridDensity(target, std::move(out));
}

} // namespace muskat
