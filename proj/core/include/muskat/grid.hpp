#pragma once

#include <cstddef>
#include <vector>

#include "muskat/errors.hpp"

namespace muskat {

/// Uniform 1D grid of cells [x_min + i*dx, x_min + (i+1)*dx).
struct Grid {
    double x_min = 0.0;
    double dx = 1.0;
    std::size_t n_cells = 2;

    Grid() = default;
    Grid(double x_min_, double dx_, std::size_t n_cells_);

    static Grid from_bounds(double x_min, double x_max, std::size_t n_cells);

    double x_max() const { return x_min + dx * static_cast<double>(n_cells); }
    double edge(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
    double center(std::size_t i) const { return x_min + dx * (static_cast<double>(i) + 0.5); }
    bool contains(double x) const { return x >= x_min && x <= x_max(); }

    bool operator==(const Grid&) const = default;
};

/// Nonnegative piecewise-constant density on a uniform grid (cell averages).
struct GridDensity {
    Grid grid;
    std::vector<double> values;

    GridDensity() = default;
    GridDensity(Grid g, std::vector<double> v);

    double mass() const;
    double second_moment() const;

    /// Integral of the density against cell-center samples of phi.
    template <typename F>
    double integrate(F&& phi) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            acc += values[i] * phi(grid.center(i));
        return acc * grid.dx;
    }

    /// Scales values so that mass() == 1. Throws ZeroMass.
    void normalize();
};

double mass(const GridDensity& u);
double second_moment(const GridDensity& u);

/// L1 and L2 distances between densities on identical grids.
double l1_distance(const GridDensity& u, const GridDensity& v);
double l2_distance(const GridDensity& u, const GridDensity& v);

/// Conservative projection onto another uniform grid (mass-preserving for
/// targets covering the source support).
GridDensity project(const GridDensity& u, const Grid& target);

} // namespace muskat
