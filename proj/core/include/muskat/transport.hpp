#pragma once

#include <cstddef>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

/// Strictly increasing particle positions; position i is the quantile of a
/// unit-mass density at level (i - 1/2) / N.
struct QuantileState {
    std::vector<double> positions;

    QuantileState() = default;
    explicit QuantileState(std::vector<double> pos);

    std::size_t size() const { return positions.size(); }
    double level(std::size_t i) const {
        return (static_cast<double>(i) + 0.5) / static_cast<double>(positions.size());
    }
    double second_moment() const;
};

/// Nondecreasing piecewise-linear map, linear between breakpoints and
/// constant-extrapolated outside them.
struct MonotoneMap {
    std::vector<double> breakpoints;
    std::vector<double> values;

    double operator()(double x) const;
};

/// Piecewise-linear CDF: nodes at cell edges, F(x_min) = 0, F(x_max) = mass.
struct PiecewiseLinearCdf {
    std::vector<double> x;  // cell edges, strictly increasing
    std::vector<double> f;  // cumulative mass, nondecreasing

    double operator()(double xq) const;

    /// Inverse with the plateau-midpoint rule for levels falling in a
    /// zero-density plateau.
    double quantile(double level) const;
};

PiecewiseLinearCdf cdf(const GridDensity& u);

QuantileState quantiles_from_density(const GridDensity& u, std::size_t n,
                                     double mass_tolerance = 1e-10);

GridDensity density_from_quantiles(const QuantileState& q, const Grid& grid);

double wasserstein2(const GridDensity& u, const GridDensity& v);

double wasserstein2_quantiles(const QuantileState& x, const QuantileState& y);

MonotoneMap monotone_map(const GridDensity& u, const GridDensity& v);

GridDensity pushforward(const GridDensity& u, const MonotoneMap& t);

/// Gaussian convolution with kernel variance 2t (heat semigroup at time t).
GridDensity heat_smooth(const GridDensity& u, double t);

} // namespace muskat
